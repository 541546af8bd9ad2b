#pragma once

// Born probabilities, Shannon entropies (in bits) and the catalog of tight
// lower bounds on entropy sums over m mutually unbiased bases.

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eurlab/error.hpp"
#include "eurlab/qstate.hpp"

namespace eurlab {

inline constexpr double kClipWindow = 1e-12;
inline constexpr double kProbSumTolerance = 1e-9;
inline constexpr double kExactCellTolerance = 1e-6;
inline constexpr double kDecimalCellTolerance = 5e-3;

class ProbabilityVector {
public:
    /// Validates each p in [0,1] and sum within 1e-9 of one.
    explicit ProbabilityVector(std::vector<double> probs) : probs_(std::move(probs)) {
        require_supported_dim(static_cast<int>(probs_.size()));
        double total = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0)) {
                throw InvalidProbabilityError("negative or NaN probability " + std::to_string(p));
            }
            if (p > 1.0) throw InvalidProbabilityError("probability above one");
            total += p;
        }
        if (std::abs(total - 1.0) > kProbSumTolerance) {
            throw InvalidProbabilityError("probabilities sum to " + std::to_string(total));
        }
    }

    /// Clips rounding residuals in [-1e-12, 0) and (1, 1+1e-12] and
    /// renormalizes when the total drifts by more than 1e-12 but less than
    /// 1e-9. Larger drift means the input state was not normalized.
    static ProbabilityVector from_raw(std::vector<double> raw) {
        double total = 0.0;
        for (double& p : raw) {
            if (p < 0.0 && p >= -kClipWindow) p = 0.0;
            if (p > 1.0 && p <= 1.0 + kClipWindow) p = 1.0;
            if (!(p >= 0.0) || p > 1.0) {
                throw InvalidProbabilityError("probability out of range: " + std::to_string(p));
            }
            total += p;
        }
        const double drift = std::abs(total - 1.0);
        if (!(drift < kProbSumTolerance)) {
            throw InvalidStateError("normalization drift " + std::to_string(drift));
        }
        if (drift > kClipWindow) {
            for (double& p : raw) p /= total;
        }
        return ProbabilityVector(std::move(raw));
    }

    int dim() const noexcept { return static_cast<int>(probs_.size()); }
    const std::vector<double>& probs() const noexcept { return probs_; }
    double operator[](int j) const { return probs_[static_cast<std::size_t>(j)]; }

private:
    std::vector<double> probs_;
};

inline ProbabilityVector born_probabilities(const PureState& state, const Basis& basis) {
    if (state.dim() != basis.dim()) {
        throw DimensionError("state and basis dimensions differ");
    }
    const Vector overlaps = basis.matrix().adjoint() * state.amplitudes();
    std::vector<double> raw(static_cast<std::size_t>(overlaps.size()));
    for (Eigen::Index j = 0; j < overlaps.size(); ++j) raw[j] = std::norm(overlaps(j));
    return ProbabilityVector::from_raw(std::move(raw));
}

/// H = -sum p log2 p with 0 log 0 = 0.
inline double shannon_entropy_bits(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw InvalidProbabilityError("negative probability");
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

inline double shannon_entropy(const ProbabilityVector& p) {
    return shannon_entropy_bits(p.probs());
}

inline double maassen_uffink_bound(const Basis& b1, const Basis& b2) {
    if (b1.dim() != b2.dim()) throw DimensionError("bases of different dimensions");
    const Matrix overlaps = b1.matrix().adjoint() * b2.matrix();
    const double c = overlaps.cwiseAbs2().maxCoeff();
    return -std::log2(c);
}

// ---------------------------------------------------------------------------
// Bound catalog

enum class BoundVariant { unique, class1, class2 };

inline std::string to_string(BoundVariant v) {
    switch (v) {
        case BoundVariant::class1: return "class1";
        case BoundVariant::class2: return "class2";
        default: return "unique";
    }
}

inline BoundVariant bound_variant_from_string(std::string_view s) {
    if (s == "class1") return BoundVariant::class1;
    if (s == "class2") return BoundVariant::class2;
    if (s == "unique") return BoundVariant::unique;
    throw BoundLookupError("unknown bound variant '" + std::string(s) + "'");
}

struct BoundCatalogEntry {
    int dim = 0;
    int m = 0;
    double value = 0.0;  // bits
    BoundVariant variant = BoundVariant::unique;
    bool exact = true;   // false for the two-decimal printed entries
    std::string expression;

    double tolerance() const noexcept {
        return exact ? kExactCellTolerance : kDecimalCellTolerance;
    }
};

/// Tight bound on the sum of m entropies over mutually unbiased bases in
/// dimension d. The (5,3) cell depends on which class the triple belongs
/// to and needs an explicit variant.
inline BoundCatalogEntry bound_lookup(int d, int m,
                                      std::optional<BoundVariant> variant = std::nullopt) {
    if (d < kMinDim || d > kMaxDim || m < 2 || m > d + 1) {
        throw BoundLookupError("no bound for d=" + std::to_string(d) + ", m=" + std::to_string(m));
    }
    const double l3 = std::log2(3.0);
    const double l5 = std::log2(5.0);
    auto exact = [&](double v, std::string expr) {
        return BoundCatalogEntry{d, m, v, BoundVariant::unique, true, std::move(expr)};
    };
    auto decimal = [&](double v, std::string expr) {
        return BoundCatalogEntry{d, m, v, BoundVariant::unique, false, std::move(expr)};
    };
    const bool ambiguous = (d == 5 && m == 3);
    if (!ambiguous && variant && *variant != BoundVariant::unique) {
        throw BoundLookupError("variant tag only applies to d=5, m=3");
    }
    switch (d) {
        case 3:
            if (m == 2) return exact(l3, "log2(3)");
            if (m == 3) return exact(3.0, "3");
            return exact(4.0, "4");
        case 4:
            if (m == 2) return exact(2.0, "2");
            if (m == 3) return exact(3.0, "3");
            if (m == 4) return exact(5.0, "5");
            return exact(7.0, "7");
        default:
            if (m == 2) return exact(l5, "log2(5)");
            if (m == 3) {
                if (!variant || *variant == BoundVariant::unique) {
                    throw BoundLookupError("d=5, m=3 needs a class1 or class2 variant");
                }
                if (*variant == BoundVariant::class1) {
                    return {5, 3, 2.0 * l5, BoundVariant::class1, true, "2*log2(5)"};
                }
                return {5, 3, 4.43, BoundVariant::class2, false, "4.43"};
            }
            if (m == 4) return decimal(6.34, "6.34");
            if (m == 5) return decimal(8.33, "8.33");
            return decimal(10.25, "10.25");
    }
}

struct EntropyReport {
    std::string state_id;
    std::vector<std::pair<Label, double>> entropies;
    double sum = 0.0;
    BoundCatalogEntry bound;
    double gap = 0.0;  // sum - bound.value
};

/// Entropies of `state` in each basis of `set`, their sum and the catalog
/// bound for (d, m).
inline EntropyReport entropy_sum(const PureState& state, const MubSet& set,
                                 std::optional<BoundVariant> variant = std::nullopt,
                                 std::string state_id = {}) {
    if (state.dim() != set.dim()) throw DimensionError("state and set dimensions differ");
    EntropyReport r;
    r.state_id = std::move(state_id);
    r.entropies.reserve(static_cast<std::size_t>(set.size()));
    for (const auto& b : set.bases()) {
        const double h = shannon_entropy(born_probabilities(state, b));
        r.entropies.emplace_back(b.label(), h);
        r.sum += h;
    }
    r.bound = bound_lookup(set.dim(), set.size(), variant);
    r.gap = r.sum - r.bound.value;
    return r;
}

/// Plain entropy sum without a bound lookup.
inline double entropy_sum_value(const PureState& state, const MubSet& set) {
    if (state.dim() != set.dim()) throw DimensionError("state and set dimensions differ");
    double s = 0.0;
    for (const auto& b : set.bases()) s += shannon_entropy(born_probabilities(state, b));
    return s;
}

}  // namespace eurlab
