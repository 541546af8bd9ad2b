#include <gtest/gtest.h>

#include "eurlab/minimizer.hpp"
#include "oracle.hpp"

using namespace eurlab;

namespace {

MinimizationConfig quick(int restarts, bool warm = false, std::uint64_t seed = 1) {
    MinimizationConfig c;
    c.restarts = restarts;
    c.catalog_warm_starts = warm;
    c.seed = seed;
    return c;
}

}  // namespace

TEST(Parametrization, RoundTrip) {
    for (int d = 3; d <= 5; ++d) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const PureState s = random_state(d, seed);
            const auto p = extract_parameters(s);
            ASSERT_EQ(static_cast<int>(p.size()), parameter_count(d));
            EXPECT_NEAR(fidelity(parametrize_state(p), s), 1.0, 1e-12);
        }
    }
}

TEST(Gradient, MatchesForwardProbe) {
    const MubSet abc = select_subset(build_full_mub_set(3), "ABC");
    const EntropyObjective obj(abc);
    const auto p = extract_parameters(random_state(3, 4));
    const auto g = obj.gradient(p, 1e-6);
    for (std::size_t k = 0; k < p.size(); ++k) {
        auto q = p;
        q[k] += 1e-5;
        auto r = p;
        r[k] -= 1e-5;
        EXPECT_NEAR(g[k], (obj.value_at(q) - obj.value_at(r)) / 2e-5, 1e-4);
    }
}

TEST(Minimizer, ExactCells) {
    struct Case {
        int d;
        const char* labels;
        double expected;
    };
    const Case cases[] = {{3, "AB", std::log2(3.0)}, {3, "ABC", 3.0}, {3, "ABCD", 4.0},
                          {4, "AB", 2.0},            {4, "BCD", 3.0}, {4, "ABCE", 5.0},
                          {4, "ABCDE", 7.0},         {5, "AB", std::log2(5.0)},
                          {5, "ABC", 2.0 * std::log2(5.0)}};
    for (const auto& c : cases) {
        const MubSet set = select_subset(build_full_mub_set(c.d), c.labels);
        const auto cb = minimize_entropy_sum(set, quick(20));
        EXPECT_NEAR(cb.min_value, c.expected, 1e-6) << c.d << " " << c.labels;
        EXPECT_FALSE(cb.below_catalog);
        ASSERT_TRUE(cb.argmin.has_value());
        EXPECT_EQ(cb.min_value, entropy_sum_value(*cb.argmin, set));
        EXPECT_GE(cb.restarts_converged, 1);
        EXPECT_EQ(cb.starts, 20);
    }
}

TEST(Minimizer, ClassTwoTriple) {
    const MubSet abd = select_subset(build_full_mub_set(5), "ABD");
    const auto cb = minimize_entropy_sum(abd, quick(40));
    EXPECT_NEAR(cb.min_value, oracle::kMinD5Class2, 1e-6);
    ASSERT_TRUE(cb.catalog.has_value());
    EXPECT_EQ(cb.catalog->variant, BoundVariant::class2);
}

TEST(Minimizer, CompleteSetD5WithWarmStarts) {
    const MubSet full = build_full_mub_set(5);
    MinimizationConfig c = quick(5, false);
    c.extra_warm_starts = states_of(optimal_states_d5(6));
    const auto cb = minimize_entropy_sum(full, c);
    EXPECT_NEAR(cb.min_value, oracle::kMinD5ABCDEF, 1e-8);
    EXPECT_NEAR(cb.catalog_gap, oracle::kMinD5ABCDEF - 10.25, 1e-8);
    EXPECT_GE(cb.best_start, 5);
}

TEST(Minimizer, SeedDeterminism) {
    const MubSet abc = select_subset(build_full_mub_set(4), "ABC");
    const auto a = minimize_entropy_sum(abc, quick(10, false, 99));
    const auto b = minimize_entropy_sum(abc, quick(10, false, 99));
    EXPECT_EQ(a.min_value, b.min_value);
    EXPECT_EQ(a.best_start, b.best_start);
    EXPECT_EQ(a.argmin->amplitudes(), b.argmin->amplitudes());
}

TEST(Minimizer, StartValuesBracketMinimum) {
    const MubSet ab = select_subset(build_full_mub_set(3), "AB");
    const auto cb = minimize_entropy_sum(ab, quick(15));
    EXPECT_LE(cb.min_value, cb.min_start_value + 1e-12);
    EXPECT_GE(cb.max_start_value, cb.min_start_value);
}

TEST(Minimizer, ConfigValidation) {
    const MubSet ab = select_subset(build_full_mub_set(3), "AB");
    EXPECT_THROW(minimize_entropy_sum(ab, quick(0)), ConfigError);
    MinimizationConfig c = quick(3);
    c.step_tolerance = 0.0;
    EXPECT_THROW(minimize_entropy_sum(ab, c), ConfigError);
    MinimizationConfig w = quick(1);
    w.extra_warm_starts.push_back(PureState::basis_vector(4, 0));
    EXPECT_THROW(minimize_entropy_sum(ab, w), DimensionError);
}

TEST(Minimizer, NonConvergenceCarriesBest) {
    const MubSet abc = select_subset(build_full_mub_set(5), "ABCD");
    MinimizationConfig c = quick(2);
    c.max_iterations = 1;
    try {
        minimize_entropy_sum(abc, c);
        FAIL() << "expected NonConvergenceError";
    } catch (const NonConvergenceError& e) {
        EXPECT_TRUE(e.best_so_far().argmin.has_value());
        EXPECT_GT(e.best_so_far().min_value, 0.0);
    }
}

TEST(Classification, SampleTriples) {
    const MubSet full = build_full_mub_set(5);
    EXPECT_EQ(classify_d5_triple(full, parse_labels("ABC"), quick(20)), BoundVariant::class1);
    EXPECT_EQ(classify_d5_triple(full, parse_labels("ABD"), quick(40)), BoundVariant::class2);
    EXPECT_EQ(classify_d5_triple(full, parse_labels("CEF"), quick(40)), BoundVariant::class1);
    EXPECT_THROW(classify_d5_triple(build_full_mub_set(4), parse_labels("ABC")), DimensionError);
    EXPECT_THROW(classify_d5_triple(full, parse_labels("ABCD")), SelectionError);
}

TEST(Exceedance, RandomStatesStayAboveBound) {
    const MubSet abc = select_subset(build_full_mub_set(3), "ABC");
    const auto scan = scan_exceedance(abc, 500, 3);
    EXPECT_EQ(scan.count_below, 0);
    EXPECT_EQ(scan.samples, 500);
    EXPECT_GE(scan.min_sum, 3.0);
    const PureState s = random_state(3, derive_seed(3, scan.argmin_index));
    EXPECT_EQ(entropy_sum_value(s, abc), scan.min_sum);
    EXPECT_THROW(scan_exceedance(abc, 0, 0), ConfigError);
}
