#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "eurlab/cli.hpp"

using namespace eurlab;
using namespace eurlab::cli;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("eurlab_test_" + name);
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

RunConfig config_for(int dim, const char* labels, std::vector<Category> cats) {
    Options flags;
    flags.dim = dim;
    flags.labels = labels;
    RunConfig cfg = resolve_config({}, flags, nullptr);
    cfg.categories = std::move(cats);
    return cfg;
}

}  // namespace

TEST(Config, ParseText) {
    const Options o = parse_config_text("# comment\ndim = 4\nlabels=ABD\n\nepsilon = 0.01, 0.02,0.03\nshots = 1000\n");
    EXPECT_EQ(o.dim, 4);
    EXPECT_EQ(o.labels, "ABD");
    EXPECT_EQ(o.shots, 1000);
    ASSERT_TRUE(o.epsilon.has_value());
    EXPECT_EQ(*o.epsilon, (std::vector<double>{0.01, 0.02, 0.03}));
    EXPECT_THROW(parse_config_text("colour = blue\n"), ConfigError);
    EXPECT_THROW(parse_config_text("dim 4\n"), ConfigError);
    EXPECT_THROW(parse_config_text("dim = four\n"), ConfigError);
}

TEST(Config, FlagsOverrideFileAndEnvIsFallback) {
    const Options file = parse_config_text("dim = 4\nlabels = ABD\nseed = 7\n");
    Options flags;
    flags.labels = "BC";
    const RunConfig a = resolve_config(file, flags, "99");
    EXPECT_EQ(a.dim, 4);
    EXPECT_EQ(labels_to_string(a.labels), "BC");
    EXPECT_EQ(a.seed, 7u);

    const RunConfig b = resolve_config(parse_config_text("dim = 5\n"), {}, "99");
    EXPECT_EQ(b.seed, 99u);
    EXPECT_EQ(labels_to_string(b.labels), "ABC");

    Options seed_flag;
    seed_flag.seed = 3;
    EXPECT_EQ(resolve_config(file, seed_flag, "99").seed, 3u);
    EXPECT_EQ(resolve_config({}, {}, nullptr).seed, 0u);
    EXPECT_THROW(resolve_config({}, {}, "abc"), ConfigError);
}

TEST(Config, Validation) {
    Options bad_dim;
    bad_dim.dim = 6;
    EXPECT_THROW(resolve_config({}, bad_dim, nullptr), DimensionError);
    Options bad_eps;
    bad_eps.epsilon = std::vector<double>{1.5};
    EXPECT_THROW(resolve_config({}, bad_eps, nullptr), ConfigError);
    Options bad_fmt;
    bad_fmt.format = "xml";
    EXPECT_THROW(resolve_config({}, bad_fmt, nullptr), ConfigError);
    Options bad_cat;
    bad_cat.categories = "optimal,weird";
    EXPECT_THROW(resolve_config({}, bad_cat, nullptr), ConfigError);
    EXPECT_THROW(read_config_file("/nonexistent/eurlab.cfg"), ConfigError);
}

TEST(Config, HashTracksContentNotOutputPath) {
    RunConfig a = config_for(3, "ABC", {Category::optimal});
    RunConfig b = a;
    b.out = "/tmp/x.csv";
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.seed = 1;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(VerifyMubs, BuiltinSetsPass) {
    for (int d = 3; d <= 5; ++d) {
        std::ostringstream log;
        EXPECT_EQ(cmd_verify_mubs(d, "", log), kOk);
        EXPECT_NE(log.str().find("PASS"), std::string::npos);
    }
}

TEST(VerifyMubs, CorruptedOverrideNamesPair) {
    // Swap in a valid orthonormal basis that is not unbiased to the others.
    Matrix m = Matrix::Identity(3, 3);
    const double c = std::cos(0.3), s = std::sin(0.3);
    m(0, 0) = c;
    m(0, 1) = -s;
    m(1, 0) = s;
    m(1, 1) = c;
    json j = json::array({to_json(Basis(Label::C, m))});
    const auto path = temp_path("override.json");
    std::ofstream(path) << j.dump();
    std::ostringstream log;
    EXPECT_EQ(cmd_verify_mubs(3, path.string(), log), kCheckFailed);
    EXPECT_NE(log.str().find("pair A-C"), std::string::npos) << log.str();
    EXPECT_NE(log.str().find("pair B-C"), std::string::npos);
    EXPECT_EQ(log.str().find("pair A-B"), std::string::npos);
    std::filesystem::remove(path);
}

TEST(VerifyMubs, NonUnitaryOverrideAndBadFile) {
    json j = to_json(build_full_mub_set(4));
    j["bases"][2]["matrix"][1][1] = json::array({3.0, 0.0});
    const auto path = temp_path("override_bad.json");
    std::ofstream(path) << j.dump();
    std::ostringstream log;
    EXPECT_EQ(cmd_verify_mubs(4, path.string(), log), kCheckFailed);
    std::ostringstream log2;
    EXPECT_EQ(cmd_verify_mubs(4, "/nonexistent.json", log2), kConfigError);
    std::filesystem::remove(path);
}

TEST(Evaluate, D3SpotValues) {
    RunConfig cfg = config_for(3, "ABC", {Category::optimal, Category::internal, Category::external});
    std::ostringstream data, log;
    ASSERT_EQ(cmd_evaluate(cfg, data, log), kOk) << log.str();
    const auto lines = lines_of(data.str());
    ASSERT_EQ(lines.size(), 1u + 9 + 9 + 3);
    EXPECT_EQ(lines[0], csv_header());
    const auto header = split(lines[0]);
    const auto sum_col = std::find(header.begin(), header.end(), "sum") - header.begin();
    auto sum_of = [&](std::size_t row) { return std::stod(split(lines[row])[sum_col]); };
    EXPECT_NEAR(sum_of(1), 3.000, 1e-9);
    EXPECT_NEAR(sum_of(10), 3.1699, 1e-4);
    EXPECT_NEAR(sum_of(19), 4.7549, 1e-4);
    EXPECT_EQ(split(lines[19])[1], "external");
}

TEST(Evaluate, RerunIsByteIdentical) {
    RunConfig cfg = config_for(4, "ABC", {Category::optimal, Category::random});
    cfg.random_count = 5;
    cfg.shots = 20000;
    cfg.epsilon = {0.02};
    cfg.resamples = 40;
    cfg.seed = 11;
    std::ostringstream d1, d2, l1, l2;
    ASSERT_EQ(cmd_evaluate(cfg, d1, l1), kOk) << l1.str();
    ASSERT_EQ(cmd_evaluate(cfg, d2, l2), kOk);
    EXPECT_EQ(d1.str(), d2.str());
    EXPECT_EQ(l1.str(), l2.str());
    cfg.seed = 12;
    std::ostringstream d3, l3;
    cmd_evaluate(cfg, d3, l3);
    EXPECT_NE(d1.str(), d3.str());
}

TEST(Evaluate, SimulationColumnsFilled) {
    RunConfig cfg = config_for(3, "AB", {Category::internal});
    cfg.shots = 100000;
    cfg.epsilon = {0.02, 0.02};
    cfg.resamples = 50;
    const auto detail_path = temp_path("detail.csv");
    cfg.detail_out = detail_path.string();
    std::ostringstream data, log;
    ASSERT_EQ(cmd_evaluate(cfg, data, log), kOk) << log.str();
    const auto lines = lines_of(data.str());
    const auto header = split(lines[0]);
    auto col = [&](const char* name) { return std::find(header.begin(), header.end(), name) - header.begin(); };
    const auto row = split(lines[1]);
    const double ideal = std::stod(row[col("sum")]);
    const double predicted = std::stod(row[col("predicted_sum")]);
    const double est = std::stod(row[col("est_sum")]);
    EXPECT_NEAR(predicted - ideal, 0.16144054254182066, 1e-9);
    EXPECT_NEAR(est, predicted, 0.01);
    EXPECT_LE(std::stod(row[col("spread_low")]), est);
    EXPECT_GE(std::stod(row[col("spread_high")]), est);

    std::ifstream in(detail_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto detail = lines_of(buf.str());
    EXPECT_EQ(detail[0], detail_csv_header());
    EXPECT_EQ(detail.size(), 1u + 6 * 2);
    std::filesystem::remove(detail_path);
}

TEST(Evaluate, EpsilonCountMismatch) {
    RunConfig cfg = config_for(3, "ABC", {Category::internal});
    cfg.epsilon = {0.01, 0.02};
    std::ostringstream data, log;
    EXPECT_EQ(cmd_evaluate(cfg, data, log), kConfigError);
}

TEST(Evaluate, D5QuadrupleReportsNineOptimalStates) {
    RunConfig cfg = config_for(5, "ABCD", {Category::optimal});
    std::ostringstream data, log;
    ASSERT_EQ(cmd_evaluate(cfg, data, log), kOk) << log.str();
    const auto lines = lines_of(data.str());
    EXPECT_EQ(lines.size(), 1u + 9);
    EXPECT_NE(log.str().find("optimal: n=9"), std::string::npos);
}

TEST(Evaluate, JsonFormatToFile) {
    RunConfig cfg = config_for(4, "AB", {Category::optimal});
    cfg.format = "json";
    const auto path = temp_path("eval.json");
    cfg.out = path.string();
    std::ostringstream data, log;
    ASSERT_EQ(cmd_evaluate(cfg, data, log), kOk);
    EXPECT_TRUE(data.str().empty());
    std::ifstream in(path);
    const json doc = json::parse(in);
    EXPECT_EQ(doc["rows"].size(), 8u);
    EXPECT_EQ(doc["config_hash"], config_hash(cfg));
    std::filesystem::remove(path);
}

TEST(Evaluate, UnwritableOutput) {
    RunConfig cfg = config_for(3, "AB", {Category::optimal});
    cfg.out = "/nonexistent/dir/out.csv";
    std::ostringstream data, log;
    EXPECT_EQ(cmd_evaluate(cfg, data, log), kConfigError);
}

TEST(Certify, ExactCellAndCompleteD5Set) {
    RunConfig cfg = config_for(4, "BCD", {Category::optimal});
    cfg.restarts = 10;
    std::ostringstream log;
    EXPECT_EQ(cmd_certify(cfg, false, log), kOk) << log.str();

    RunConfig c6 = config_for(5, "ABCDEF", {Category::optimal});
    c6.restarts = 5;
    std::ostringstream log6;
    EXPECT_EQ(cmd_certify(c6, false, log6), kOk) << log6.str();
}

TEST(Certify, AllSubsetsInD3) {
    RunConfig cfg = config_for(3, "AB", {Category::optimal});
    cfg.restarts = 10;
    const auto path = temp_path("certify.json");
    cfg.out = path.string();
    std::ostringstream log;
    EXPECT_EQ(cmd_certify(cfg, true, log), kOk) << log.str();
    std::ifstream in(path);
    const json doc = json::parse(in);
    EXPECT_EQ(doc["cells"].size(), 6u + 4u + 1u);
    std::filesystem::remove(path);
}

TEST(Catalog, WritesFamilyWithSums) {
    const auto path = temp_path("catalog.json");
    std::ostringstream log;
    EXPECT_EQ(cmd_catalog(4, parse_labels("ACE"), log, path.string()), kOk);
    std::ifstream in(path);
    const json doc = json::parse(in);
    ASSERT_EQ(doc["states"].size(), 4u);
    for (const auto& s : doc["states"]) EXPECT_NEAR(s["entropy_sum"].get<double>(), 3.0, 1e-12);
    std::filesystem::remove(path);
}

TEST(Selftest, Passes) {
    std::ostringstream log;
    EXPECT_EQ(cmd_selftest(false, log), kOk);
    EXPECT_NE(log.str().find("selftest PASS"), std::string::npos);
}
