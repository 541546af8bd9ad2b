#pragma once

// Imperfect measurement chain: POVMs with cross-talk, multinomial photon
// counts, plug-in entropy estimates and Monte-Carlo resampling spreads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "eurlab/entropy.hpp"
#include "eurlab/error.hpp"
#include "eurlab/qstate.hpp"
#include "eurlab/random.hpp"

namespace eurlab {

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kCompletenessTolerance = 1e-10;
inline constexpr int kDefaultResamples = 500;
inline constexpr std::int64_t kDefaultShots = 1'000'000;

/// d measurement operators pi^gamma, written in the computational basis as
/// pi^gamma = sum_ij m^gamma_ij |a_i><a_j|.
class Povm {
public:
    explicit Povm(std::vector<Matrix> elements) : elements_(std::move(elements)) {
        if (elements_.empty()) throw PovmError("POVM has no elements");
        const auto d = elements_.front().rows();
        require_supported_dim(static_cast<int>(d));
        if (static_cast<Eigen::Index>(elements_.size()) != d) {
            throw PovmError("expected one POVM element per output channel");
        }
        Matrix total = Matrix::Zero(d, d);
        for (std::size_t g = 0; g < elements_.size(); ++g) {
            const Matrix& e = elements_[g];
            if (e.rows() != d || e.cols() != d) throw PovmError("POVM element has wrong shape");
            if ((e - e.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance) {
                throw PovmError("POVM element " + std::to_string(g) + " is not Hermitian");
            }
            Eigen::SelfAdjointEigenSolver<Matrix> solver(e, Eigen::EigenvaluesOnly);
            if (solver.eigenvalues().minCoeff() < -kPsdTolerance) {
                throw PovmError("POVM element " + std::to_string(g) +
                                " is not positive semidefinite");
            }
            total += e;
        }
        if ((total - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kCompletenessTolerance) {
            throw PovmError("POVM elements do not sum to the identity");
        }
    }

    int dim() const noexcept { return static_cast<int>(elements_.front().rows()); }
    const std::vector<Matrix>& elements() const noexcept { return elements_; }
    const Matrix& element(int gamma) const { return elements_.at(static_cast<std::size_t>(gamma)); }

    /// max entrywise |sum_gamma pi^gamma - I|
    double completeness_deviation() const {
        Matrix total = Matrix::Zero(dim(), dim());
        for (const auto& e : elements_) total += e;
        return (total - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
    }

private:
    std::vector<Matrix> elements_;
};

inline Povm build_ideal_povm(const Basis& basis) {
    std::vector<Matrix> elements;
    for (int g = 0; g < basis.dim(); ++g) {
        const auto col = basis.matrix().col(g);
        elements.push_back(col * col.adjoint());
    }
    return Povm(std::move(elements));
}

/// pi^gamma = (1-eps)|gamma><gamma| + eps/(d-1) sum_{gamma' != gamma} |gamma'><gamma'|.
/// An eigenstate of the basis fires a wrong channel with probability eps.
inline Povm build_crosstalk_povm(const Basis& basis, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw PovmError("cross-talk must lie in [0, 1), got " + std::to_string(epsilon));
    }
    const int d = basis.dim();
    std::vector<Matrix> projectors;
    for (int g = 0; g < d; ++g) {
        const auto col = basis.matrix().col(g);
        projectors.push_back(col * col.adjoint());
    }
    const double leak = epsilon / (d - 1);
    std::vector<Matrix> elements;
    for (int g = 0; g < d; ++g) {
        Matrix e = (1.0 - epsilon) * projectors[static_cast<std::size_t>(g)];
        for (int h = 0; h < d; ++h) {
            if (h != g) e += leak * projectors[static_cast<std::size_t>(h)];
        }
        elements.push_back(std::move(e));
    }
    return Povm(std::move(elements));
}

/// p_gamma = <psi|pi^gamma|psi>
inline ProbabilityVector apply_povm(const PureState& state, const Povm& povm) {
    if (state.dim() != povm.dim()) throw DimensionError("state and POVM dimensions differ");
    std::vector<double> raw;
    raw.reserve(static_cast<std::size_t>(povm.dim()));
    for (const auto& e : povm.elements()) {
        raw.push_back(state.amplitudes().dot(e * state.amplitudes()).real());
    }
    return ProbabilityVector::from_raw(std::move(raw));
}

struct CountRecord {
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;

    static CountRecord from_counts(std::vector<std::int64_t> counts) {
        CountRecord r;
        for (auto c : counts) {
            if (c < 0) throw InvalidProbabilityError("negative count");
            r.total += c;
        }
        r.counts = std::move(counts);
        return r;
    }
};

namespace detail {

inline std::vector<std::int64_t> multinomial(std::span<const double> probs, std::int64_t n,
                                             Rng& rng) {
    std::vector<std::int64_t> counts(probs.size(), 0);
    std::int64_t remaining = n;
    double mass = 1.0;
    for (std::size_t j = 0; j + 1 < probs.size() && remaining > 0; ++j) {
        const double q = mass > 0.0 ? std::clamp(probs[j] / mass, 0.0, 1.0) : 0.0;
        std::int64_t k = 0;
        if (q >= 1.0) {
            k = remaining;
        } else if (q > 0.0) {
            std::binomial_distribution<std::int64_t> dist(remaining, q);
            k = dist(rng);
        }
        counts[j] = k;
        remaining -= k;
        mass -= probs[j];
    }
    counts.back() += remaining;
    return counts;
}

inline double plugin_entropy(std::span<const std::int64_t> counts, std::int64_t total) {
    double h = 0.0;
    const double n = static_cast<double>(total);
    for (auto c : counts) {
        if (c > 0) {
            const double p = static_cast<double>(c) / n;
            h -= p * std::log2(p);
        }
    }
    return h;
}

// Linear interpolation between order statistics at position q*(n-1).
inline double percentile_sorted(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

/// One multinomial draw of n trials.
inline CountRecord simulate_counts(const ProbabilityVector& probs, std::int64_t n,
                                   std::uint64_t seed) {
    if (n < 1) throw ConfigError("shot count must be at least 1");
    Rng rng = make_rng(seed);
    return CountRecord::from_counts(detail::multinomial(probs.probs(), n, rng));
}

/// Plug-in Shannon entropy of counts/total, in bits.
inline double estimate_entropy(const CountRecord& counts) {
    if (counts.total <= 0) throw InvalidProbabilityError("cannot estimate entropy from zero counts");
    return detail::plugin_entropy(counts.counts, counts.total);
}

struct SpreadEstimate {
    double point = 0.0;
    double low = 0.0;   // 10th percentile
    double high = 0.0;  // 90th percentile
    int n_resamples = 0;

    double width() const noexcept { return high - low; }
};

/// Resamples the summed plug-in entropy of several count records. Resample
/// r draws record k with seed derive_seed(derive_seed(seed, r), k). The
/// interval is widened to contain the point estimate when the resampling
/// bias pushes both percentiles to one side.
inline SpreadEstimate monte_carlo_spread_sum(std::span<const CountRecord> records,
                                             int n_resamples = kDefaultResamples,
                                             std::uint64_t seed = 0) {
    if (n_resamples < 2) throw ConfigError("at least two resamples are required");
    if (records.empty()) throw ConfigError("no count records to resample");
    SpreadEstimate out;
    out.n_resamples = n_resamples;
    std::vector<std::vector<double>> empirical;
    for (const auto& rec : records) {
        out.point += estimate_entropy(rec);
        std::vector<double> p;
        for (auto c : rec.counts) p.push_back(static_cast<double>(c) / static_cast<double>(rec.total));
        empirical.push_back(std::move(p));
    }
    std::vector<double> values(static_cast<std::size_t>(n_resamples));
    for (int r = 0; r < n_resamples; ++r) {
        const auto rseed = derive_seed(seed, static_cast<std::uint64_t>(r));
        double sum = 0.0;
        for (std::size_t k = 0; k < records.size(); ++k) {
            Rng rng = make_rng(derive_seed(rseed, k));
            const auto counts = detail::multinomial(empirical[k], records[k].total, rng);
            sum += detail::plugin_entropy(counts, records[k].total);
        }
        values[static_cast<std::size_t>(r)] = sum;
    }
    std::sort(values.begin(), values.end());
    out.low = std::min(detail::percentile_sorted(values, 0.10), out.point);
    out.high = std::max(detail::percentile_sorted(values, 0.90), out.point);
    return out;
}

inline SpreadEstimate monte_carlo_spread(const CountRecord& counts,
                                         int n_resamples = kDefaultResamples,
                                         std::uint64_t seed = 0) {
    return monte_carlo_spread_sum(std::span<const CountRecord>(&counts, 1), n_resamples, seed);
}

/// Entropy sum seen through cross-talk POVMs, one epsilon per basis.
inline EntropyReport predicted_entropy_sum(const PureState& state, const MubSet& set,
                                           std::span<const double> epsilon_per_basis,
                                           std::optional<BoundVariant> variant = std::nullopt,
                                           std::string state_id = {}) {
    if (static_cast<int>(epsilon_per_basis.size()) != set.size()) {
        throw ConfigError("expected " + std::to_string(set.size()) + " cross-talk values, got " +
                          std::to_string(epsilon_per_basis.size()));
    }
    if (state.dim() != set.dim()) throw DimensionError("state and set dimensions differ");
    EntropyReport r;
    r.state_id = std::move(state_id);
    for (std::size_t k = 0; k < epsilon_per_basis.size(); ++k) {
        const Basis& b = set.bases()[k];
        const double h = shannon_entropy(apply_povm(state, build_crosstalk_povm(b, epsilon_per_basis[k])));
        r.entropies.emplace_back(b.label(), h);
        r.sum += h;
    }
    r.bound = bound_lookup(set.dim(), set.size(), variant);
    r.gap = r.sum - r.bound.value;
    return r;
}

}  // namespace eurlab
