#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eurlab/entropy.hpp"
#include "oracle.hpp"

using namespace eurlab;

namespace {

PureState two_term(int d, int j1, int j2, double phase) {
    Vector v = Vector::Zero(d);
    v(j1) = 1.0 / std::sqrt(2.0);
    v(j2) = std::polar(1.0 / std::sqrt(2.0), phase);
    return PureState::normalized(v);
}

std::vector<std::vector<Label>> subsets_of_size(const std::vector<Label>& all, int m) {
    std::vector<std::vector<Label>> out;
    const int n = static_cast<int>(all.size());
    for (int mask = 0; mask < (1 << n); ++mask) {
        if (__builtin_popcount(mask) != m) continue;
        std::vector<Label> s;
        for (int k = 0; k < n; ++k)
            if (mask & (1 << k)) s.push_back(all[k]);
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST(BornProbabilities, Examples) {
    const MubSet s = build_full_mub_set(3);
    const PureState zero = PureState::basis_vector(3, 0);
    const auto pa = born_probabilities(zero, s.at(Label::A));
    EXPECT_EQ(pa.probs(), (std::vector<double>{1.0, 0.0, 0.0}));
    const auto pb = born_probabilities(zero, s.at(Label::B));
    for (double p : pb.probs()) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
    const auto pm = born_probabilities(two_term(3, 0, 1, std::numbers::pi), s.at(Label::A));
    EXPECT_NEAR(pm[0], 0.5, 1e-15);
    EXPECT_NEAR(pm[1], 0.5, 1e-15);
    EXPECT_EQ(pm[2], 0.0);
    EXPECT_THROW(born_probabilities(zero, build_computational_basis(4)), DimensionError);
}

TEST(ProbabilityVector, ValidationAndClipping) {
    EXPECT_THROW(ProbabilityVector({0.5, 0.6, -0.1}), InvalidProbabilityError);
    EXPECT_THROW(ProbabilityVector({0.5, 0.4, 0.0}), InvalidProbabilityError);
    const auto clipped = ProbabilityVector::from_raw({1.0 + 5e-13, -5e-13, 0.0});
    EXPECT_EQ(clipped[0], 1.0);
    EXPECT_EQ(clipped[1], 0.0);
    const auto renorm = ProbabilityVector::from_raw({0.5 + 1e-11, 0.5, 0.0});
    EXPECT_NEAR(renorm[0] + renorm[1], 1.0, 1e-15);
    EXPECT_THROW(ProbabilityVector::from_raw({0.5 + 1e-8, 0.5, 0.0}), InvalidStateError);
}

TEST(ShannonEntropy, Examples) {
    EXPECT_EQ(shannon_entropy(ProbabilityVector({1.0, 0.0, 0.0})), 0.0);
    EXPECT_NEAR(shannon_entropy(ProbabilityVector(std::vector<double>(5, 0.2))), 2.321928094887362, 1e-12);
    EXPECT_NEAR(shannon_entropy(ProbabilityVector({0.5, 0.5, 0.0, 0.0})), 1.0, 1e-15);
    const std::vector<double> bad{0.5, 0.6, -0.1};
    EXPECT_THROW(shannon_entropy_bits(bad), InvalidProbabilityError);
}

TEST(ShannonEntropy, BoundedByLogDimension) {
    Rng rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 3 + trial % 3;
        std::vector<double> p(d);
        double s = 0;
        for (auto& x : p) s += (x = u(rng) * (trial % 7 == 0 ? 0.0 : 1.0) + (trial % 7 == 0 && &x == &p[0]));
        for (auto& x : p) x /= s;
        const double h = shannon_entropy(ProbabilityVector(p));
        EXPECT_GE(h, 0.0);
        EXPECT_LE(h, std::log2(double(d)) + 1e-12);
        EXPECT_NEAR(h, oracle::entropy(p), 1e-12);
    }
}

TEST(EntropySum, D3Examples) {
    const MubSet abc = select_subset(build_full_mub_set(3), "ABC");
    const auto internal = entropy_sum(PureState::basis_vector(3, 0), abc);
    EXPECT_NEAR(internal.sum, 2.0 * std::log2(3.0), 1e-12);
    EXPECT_NEAR(internal.sum, 3.1699, 1e-4);

    const auto optimal = entropy_sum(two_term(3, 0, 1, std::numbers::pi), abc);
    EXPECT_NEAR(optimal.sum, 3.0, 1e-12);
    EXPECT_NEAR(optimal.gap, 0.0, 1e-12);

    const PureState d0 = build_full_mub_set(3).at(Label::D).column(0);
    const auto external = entropy_sum(d0, abc);
    EXPECT_NEAR(external.sum, 3.0 * std::log2(3.0), 1e-12);
    EXPECT_NEAR(external.sum, 4.7549, 1e-4);

    double total = 0;
    for (const auto& [l, h] : external.entropies) total += h;
    EXPECT_NEAR(total, external.sum, 1e-12);
    EXPECT_EQ(external.gap, external.sum - external.bound.value);
}

TEST(EntropySum, MatchesOracleOnRandomStates) {
    for (int d = 3; d <= 5; ++d) {
        const MubSet full = build_full_mub_set(d);
        const std::string labels = full.label_string();
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const PureState s = random_state(d, seed);
            oracle::Vec psi(s.amplitudes().data(), s.amplitudes().data() + d);
            EXPECT_NEAR(entropy_sum_value(s, full), oracle::entropy_sum(d, labels.c_str(), psi), 1e-12);
        }
    }
}

TEST(EntropySum, AmbiguousCellNeedsVariant) {
    const MubSet abc = select_subset(build_full_mub_set(5), "ABC");
    EXPECT_THROW(entropy_sum(PureState::basis_vector(5, 0), abc), BoundLookupError);
    const auto r = entropy_sum(PureState::basis_vector(5, 0), abc, BoundVariant::class1);
    EXPECT_NEAR(r.gap, 0.0, 1e-12);
}

TEST(MaassenUffink, Examples) {
    const MubSet s4 = build_full_mub_set(4);
    EXPECT_NEAR(maassen_uffink_bound(s4.at(Label::A), s4.at(Label::B)), 2.0, 1e-12);
    EXPECT_NEAR(maassen_uffink_bound(s4.at(Label::A), s4.at(Label::A)), 0.0, 1e-15);
    const MubSet s5 = build_full_mub_set(5);
    EXPECT_NEAR(maassen_uffink_bound(s5.at(Label::A), s5.at(Label::B)), std::log2(5.0), 1e-12);
}

TEST(MaassenUffink, HoldsForRandomStatesOverEveryPair) {
    for (int d = 3; d <= 5; ++d) {
        const auto bases = full_mub_bases(d);
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const PureState s = random_state(d, 1000 + seed);
            for (std::size_t a = 0; a < bases.size(); ++a)
                for (std::size_t b = a + 1; b < bases.size(); ++b)
                    EXPECT_GE(shannon_entropy(born_probabilities(s, bases[a])) +
                                  shannon_entropy(born_probabilities(s, bases[b])),
                              std::log2(double(d)) - 1e-9);
        }
    }
}

TEST(BoundLookup, CatalogValues) {
    EXPECT_EQ(bound_lookup(3, 4).value, 4.0);
    EXPECT_NEAR(bound_lookup(3, 2).value, std::log2(3.0), 1e-15);
    EXPECT_NEAR(bound_lookup(5, 3, BoundVariant::class1).value, 4.6439, 1e-4);
    EXPECT_EQ(bound_lookup(5, 3, BoundVariant::class2).value, 4.43);
    EXPECT_FALSE(bound_lookup(5, 3, BoundVariant::class2).exact);
    EXPECT_EQ(bound_lookup(5, 6).value, 10.25);
    EXPECT_EQ(bound_lookup(5, 6).tolerance(), 5e-3);
    EXPECT_EQ(bound_lookup(4, 5).value, 7.0);
    EXPECT_EQ(bound_lookup(4, 5).tolerance(), 1e-6);
    for (int d = 3; d <= 5; ++d) EXPECT_NEAR(bound_lookup(d, 2).value, std::log2(double(d)), 0.0);
}

TEST(BoundLookup, Errors) {
    EXPECT_THROW(bound_lookup(3, 5), BoundLookupError);
    EXPECT_THROW(bound_lookup(3, 1), BoundLookupError);
    EXPECT_THROW(bound_lookup(6, 2), BoundLookupError);
    EXPECT_THROW(bound_lookup(5, 3), BoundLookupError);
    EXPECT_THROW(bound_lookup(4, 3, BoundVariant::class1), BoundLookupError);
}

// Internal eigenstates sit at (m-1) log2 d and external ones at m log2 d,
// for every subset of every complete set.
TEST(EntropySum, EigenstateLevelsOverAllSubsets) {
    for (int d = 3; d <= 5; ++d) {
        const MubSet full = build_full_mub_set(d);
        const double ld = std::log2(double(d));
        for (int m = 2; m <= d + 1; ++m) {
            for (const auto& labels : subsets_of_size(full.labels(), m)) {
                const MubSet set = select_subset(full, labels);
                for (const auto& b : full.bases()) {
                    const double expected = (set.contains(b.label()) ? m - 1 : m) * ld;
                    for (int j = 0; j < d; ++j) {
                        EXPECT_NEAR(entropy_sum_value(b.column(j), set), expected, 1e-9)
                            << "d=" << d << " set=" << set.label_string() << " eig " << to_char(b.label()) << j;
                    }
                }
            }
        }
    }
}
