#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eurlab/cli.hpp"

namespace {

struct FlagValues {
    int dim = 0;
    std::string labels, categories, format, out, detail_out, variant, config, override_path;
    std::int64_t shots = -1;
    std::vector<double> epsilon;
    std::uint64_t seed = 0;
    int restarts = 0, random_count = -1, resamples = 0;
};

void add_common(CLI::App* cmd, FlagValues& f) {
    cmd->add_option("--dim", f.dim, "Hilbert-space dimension (3, 4 or 5)");
    cmd->add_option("--labels", f.labels, "MUB labels, e.g. ABC");
    cmd->add_option("--seed", f.seed, "Base seed (falls back to EURLAB_SEED)");
    cmd->add_option("--restarts", f.restarts, "Random restarts per minimization");
    cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", f.out, "Output file");
    cmd->add_option("--config", f.config, "Flat key = value config file");
    cmd->add_option("--variant", f.variant, "Bound variant for d=5 triples")
        ->check(CLI::IsMember({"auto", "class1", "class2"}));
}

eurlab::cli::Options to_options(const CLI::App* cmd, const FlagValues& f) {
    eurlab::cli::Options o;
    auto set = [cmd](const char* name) { return cmd->get_option_no_throw(name) && cmd->count(name) > 0; };
    if (set("--dim")) o.dim = f.dim;
    if (set("--labels")) o.labels = f.labels;
    if (set("--categories")) o.categories = f.categories;
    if (set("--shots")) o.shots = f.shots;
    if (set("--epsilon")) o.epsilon = f.epsilon;
    if (set("--seed")) o.seed = f.seed;
    if (set("--restarts")) o.restarts = f.restarts;
    if (set("--format")) o.format = f.format;
    if (set("--out")) o.out = f.out;
    if (set("--detail-out")) o.detail_out = f.detail_out;
    if (set("--random-count")) o.random_count = f.random_count;
    if (set("--resamples")) o.resamples = f.resamples;
    if (set("--variant")) o.variant = f.variant;
    return o;
}

eurlab::cli::RunConfig resolve(const CLI::App* cmd, const FlagValues& f) {
    eurlab::cli::Options file;
    if (!f.config.empty()) file = eurlab::cli::read_config_file(f.config);
    return eurlab::cli::resolve_config(file, to_options(cmd, f));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entropic uncertainty relations over mutually unbiased bases in d = 3, 4, 5"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(eurlab::kVersion));
    FlagValues f;
    bool verbose = false;
    bool all = false;

    auto* verify = app.add_subcommand("verify-mubs", "Check unitarity and pairwise unbiasedness");
    verify->add_option("--dim", f.dim, "Dimension")->required();
    verify->add_option("--override", f.override_path, "JSON file with replacement bases");
    verify->add_option("--out", f.out, "JSON report file");

    auto* certify = app.add_subcommand("certify", "Minimize the entropy sum and compare to the catalog bound");
    add_common(certify, f);
    certify->add_flag("--all", all, "Certify every subset of the complete set");

    auto* classify = app.add_subcommand("classify-triples", "Sort the 20 d=5 triples into bound classes");
    add_common(classify, f);

    auto* evaluate = app.add_subcommand("evaluate", "Entropy sums for probe states, with optional simulated counts");
    add_common(evaluate, f);
    evaluate->add_option("--categories", f.categories, "optimal,internal,external,random");
    evaluate->add_option("--shots", f.shots, "Shots per (state, basis); 0 disables simulation");
    evaluate->add_option("--epsilon", f.epsilon, "Cross-talk per basis (repeatable)");
    evaluate->add_option("--random-count", f.random_count, "Number of random states");
    evaluate->add_option("--resamples", f.resamples, "Monte-Carlo resamples");
    evaluate->add_option("--detail-out", f.detail_out, "Per (state, basis) CSV");

    auto* catalog = app.add_subcommand("catalog", "List the optimal-state family for a set as JSON");
    catalog->add_option("--dim", f.dim, "Dimension")->required();
    catalog->add_option("--labels", f.labels, "MUB labels")->required();
    catalog->add_option("--out", f.out, "Output file");

    auto* selftest = app.add_subcommand("selftest", "Fast consistency checks");
    selftest->add_flag("--verbose", verbose, "List every checked cell");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return eurlab::cli::cmd_verify_mubs(f.dim, f.override_path, std::cout, f.out);
        if (selftest->parsed()) return eurlab::cli::cmd_selftest(verbose, std::cout);
        if (catalog->parsed()) {
            return eurlab::cli::cmd_catalog(f.dim, eurlab::parse_labels(f.labels), std::cout, f.out);
        }
        if (certify->parsed()) return eurlab::cli::cmd_certify(resolve(certify, f), all, std::cout);
        if (classify->parsed()) return eurlab::cli::cmd_classify_triples(resolve(classify, f), std::cout);
        if (evaluate->parsed()) return eurlab::cli::cmd_evaluate(resolve(evaluate, f), std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return eurlab::cli::kConfigError;
    }
    return eurlab::cli::kConfigError;
}
