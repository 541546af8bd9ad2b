#pragma once

// Hyperspherical parametrization of pure states and a finite-difference
// gradient descent on the entropy sum over a MUB set.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "eurlab/entropy.hpp"
#include "eurlab/qstate.hpp"

namespace eurlab {

/// Floor applied to probabilities when the entropy is evaluated for
/// gradient purposes; reported values always use the exact entropy.
inline constexpr double kGradientProbabilityFloor = 1e-14;

inline int parameter_count(int d) { return 2 * d - 2; }

namespace detail {

// Angles theta[0..d-2] set the moduli; phases[0..d-2] are relative to
// amplitude 0, which is kept real.
inline void amplitudes_from_parameters(std::span<const double> params, Vector& out) {
    const int d = static_cast<int>(params.size() + 2) / 2;
    out.resize(d);
    double tail = 1.0;
    for (int k = 0; k < d - 1; ++k) {
        const double r = tail * std::cos(params[k]);
        tail *= std::sin(params[k]);
        out(k) = k == 0 ? cplx(r, 0.0) : std::polar(r, params[d - 1 + k - 1]);
    }
    out(d - 1) = std::polar(tail, params[2 * d - 3]);
}

}  // namespace detail

/// Maps 2d-2 reals onto a normalized state with amplitude 0 real. All-zero
/// parameters give |0>.
inline PureState parametrize_state(std::span<const double> params) {
    if (params.size() % 2 != 0) {
        throw DimensionError("parameter vector must have even length 2d-2");
    }
    const int d = static_cast<int>(params.size() + 2) / 2;
    require_supported_dim(d);
    Vector v;
    detail::amplitudes_from_parameters(params, v);
    return PureState::normalized(std::move(v));
}

/// Inverse of parametrize_state up to global phase.
inline std::vector<double> extract_parameters(const PureState& state) {
    const int d = state.dim();
    std::vector<double> params(static_cast<std::size_t>(parameter_count(d)), 0.0);
    const Vector& a = state.amplitudes();
    const double ref = std::abs(a(0)) > 0.0 ? std::arg(a(0)) : 0.0;
    std::vector<double> tail(static_cast<std::size_t>(d) + 1, 0.0);
    for (int k = d - 1; k >= 0; --k) tail[k] = tail[k + 1] + std::norm(a(k));
    for (int k = 0; k < d - 1; ++k) {
        params[k] = std::atan2(std::sqrt(tail[k + 1]), std::abs(a(k)));
    }
    for (int k = 1; k < d; ++k) params[d - 1 + k - 1] = std::arg(a(k)) - ref;
    return params;
}

class EntropyObjective {
public:
    explicit EntropyObjective(const MubSet& set) : dim_(set.dim()) {
        adjoints_.reserve(static_cast<std::size_t>(set.size()));
        for (const auto& b : set.bases()) adjoints_.push_back(b.matrix().adjoint());
    }

    int dim() const noexcept { return dim_; }
    int parameter_count() const noexcept { return eurlab::parameter_count(dim_); }

    /// Exact entropy sum of normalized amplitudes.
    double value(const Vector& amplitudes) const { return evaluate(amplitudes, 0.0); }

    double value_at(std::span<const double> params) const {
        Vector v;
        detail::amplitudes_from_parameters(params, v);
        return evaluate(v, 0.0);
    }

    double smoothed_at(std::span<const double> params) const {
        Vector v;
        detail::amplitudes_from_parameters(params, v);
        return evaluate(v, kGradientProbabilityFloor);
    }

    /// Central differences of the smoothed objective.
    std::vector<double> gradient(std::span<const double> params, double step) const {
        std::vector<double> x(params.begin(), params.end());
        std::vector<double> g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double orig = x[i];
            x[i] = orig + step;
            const double fp = smoothed_at(x);
            x[i] = orig - step;
            const double fm = smoothed_at(x);
            x[i] = orig;
            g[i] = (fp - fm) / (2.0 * step);
        }
        return g;
    }

private:
    double evaluate(const Vector& amplitudes, double floor) const {
        double h = 0.0;
        for (const auto& adj : adjoints_) {
            const Vector overlaps = adj * amplitudes;
            for (Eigen::Index j = 0; j < overlaps.size(); ++j) {
                double p = std::norm(overlaps(j));
                if (floor > 0.0) p = std::max(p, floor);
                if (p > 0.0) h -= p * std::log2(p);
            }
        }
        return h;
    }

    int dim_;
    std::vector<Matrix> adjoints_;
};

struct DescentOptions {
    int max_iterations = 5000;
    double step_tolerance = 1e-10;
    double finite_difference_step = 1e-6;
};

struct DescentResult {
    std::vector<double> params;
    double value = 0.0;  // exact objective at params
    int iterations = 0;
    bool converged = false;
};

/// Gradient descent with Barzilai-Borwein step proposals and Armijo
/// backtracking. Converges when the accepted step falls below the step
/// tolerance or no decrease is achievable at numerical precision.
inline DescentResult local_descent(const EntropyObjective& objective, std::vector<double> x,
                                   const DescentOptions& opts = {}) {
    const double h = opts.finite_difference_step;
    double f = objective.smoothed_at(x);
    std::vector<double> g = objective.gradient(x, h);
    std::vector<double> trial(x.size());
    double alpha = 0.1;

    DescentResult result;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        double gg = 0.0;
        for (double gi : g) gg += gi * gi;
        const double gnorm = std::sqrt(gg);

        bool accepted = false;
        double f_trial = f;
        while (alpha * gnorm >= opts.step_tolerance) {
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - alpha * g[i];
            f_trial = objective.smoothed_at(trial);
            if (f_trial <= f - 1e-4 * alpha * gg) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            result.converged = true;
            break;
        }

        std::vector<double> g_new = objective.gradient(trial, h);
        double ss = 0.0;
        double sy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double s = trial[i] - x[i];
            ss += s * s;
            sy += s * (g_new[i] - g[i]);
        }
        x.swap(trial);
        g.swap(g_new);
        f = f_trial;

        if (std::sqrt(ss) < opts.step_tolerance) {
            result.converged = true;
            ++it;
            break;
        }
        alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-8, 1e3) : std::min(alpha * 2.0, 1e3);
    }
    result.iterations = it;
    result.value = objective.value_at(x);
    result.params = std::move(x);
    return result;
}

}  // namespace eurlab
