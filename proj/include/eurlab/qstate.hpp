#pragma once

// Pure qudit states, orthonormal bases and the complete sets of mutually
// unbiased bases (MUBs) in dimensions 3, 4 and 5, written as Hadamard
// matrices whose columns are the basis states.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "eurlab/error.hpp"
#include "eurlab/random.hpp"

namespace eurlab {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kUnbiasedTolerance = 1e-10;
inline constexpr int kMinDim = 3;
inline constexpr int kMaxDim = 5;

enum class Label : std::uint8_t { A, B, C, D, E, F };

inline constexpr std::array<Label, 6> kAllLabels{Label::A, Label::B, Label::C,
                                                 Label::D, Label::E, Label::F};

inline char to_char(Label l) { return static_cast<char>('A' + static_cast<int>(l)); }

inline int index_of(Label l) { return static_cast<int>(l); }

inline Label label_from_char(char c) {
    if (c < 'A' || c > 'F') {
        throw SelectionError(std::string("unknown basis label '") + c + "'");
    }
    return static_cast<Label>(c - 'A');
}

/// Parses a compact label string such as "ABD". Commas and spaces are ignored.
inline std::vector<Label> parse_labels(std::string_view text) {
    std::vector<Label> out;
    for (char c : text) {
        if (c == ',' || c == ' ') continue;
        out.push_back(label_from_char(c));
    }
    return out;
}

inline std::string labels_to_string(std::span<const Label> labels) {
    std::string s;
    for (Label l : labels) s.push_back(to_char(l));
    return s;
}

inline void require_supported_dim(int d) {
    if (d < kMinDim || d > kMaxDim) {
        throw DimensionError("unsupported dimension " + std::to_string(d) +
                             " (expected 3, 4 or 5)");
    }
}

class PureState {
public:
    /// Wraps an already normalized amplitude vector; rejects drift above 1e-12.
    static PureState from_amplitudes(Vector amplitudes) {
        require_supported_dim(static_cast<int>(amplitudes.size()));
        const double drift = std::abs(amplitudes.squaredNorm() - 1.0);
        if (!(drift <= kNormTolerance)) {
            throw InvalidStateError("state is not normalized (|norm^2 - 1| = " +
                                    std::to_string(drift) + ")");
        }
        return PureState(std::move(amplitudes));
    }

    static PureState normalized(Vector amplitudes) {
        require_supported_dim(static_cast<int>(amplitudes.size()));
        const double n = amplitudes.norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw InvalidStateError("cannot normalize a zero or non-finite vector");
        }
        amplitudes /= n;
        return PureState(std::move(amplitudes));
    }

    static PureState basis_vector(int d, int j) {
        require_supported_dim(d);
        Vector v = Vector::Zero(d);
        v(j) = 1.0;
        return PureState(std::move(v));
    }

    int dim() const noexcept { return static_cast<int>(amplitudes_.size()); }
    const Vector& amplitudes() const noexcept { return amplitudes_; }
    cplx operator[](int j) const { return amplitudes_(j); }

private:
    explicit PureState(Vector v) : amplitudes_(std::move(v)) {}
    Vector amplitudes_;
};

inline cplx inner(const PureState& a, const PureState& b) {
    return a.amplitudes().dot(b.amplitudes());  // conjugates the left operand
}

/// |<a|b>|^2; insensitive to global phase.
inline double fidelity(const PureState& a, const PureState& b) {
    return std::norm(inner(a, b));
}

class Basis {
public:
    /// Columns of `columns` are the basis states. Orthonormality is checked
    /// at kUnbiasedTolerance so imported data with small rounding still loads.
    Basis(Label label, Matrix columns) : label_(label), columns_(std::move(columns)) {
        if (columns_.rows() != columns_.cols()) {
            throw DimensionError("basis matrix must be square");
        }
        require_supported_dim(static_cast<int>(columns_.rows()));
        const double dev = unitarity_deviation();
        if (!(dev < kUnbiasedTolerance)) {
            throw InvalidStateError(std::string("basis ") + to_char(label_) +
                                    " is not orthonormal (deviation " +
                                    std::to_string(dev) + ")");
        }
    }

    Label label() const noexcept { return label_; }
    int dim() const noexcept { return static_cast<int>(columns_.rows()); }
    const Matrix& matrix() const noexcept { return columns_; }

    PureState column(int j) const { return PureState::normalized(columns_.col(j)); }

    /// max entrywise |B^dagger B - I|
    double unitarity_deviation() const {
        const Matrix gram = columns_.adjoint() * columns_;
        return (gram - Matrix::Identity(columns_.rows(), columns_.cols())).cwiseAbs().maxCoeff();
    }

private:
    Label label_;
    Matrix columns_;
};

struct UnbiasednessCheck {
    bool unbiased = false;
    double max_deviation = 0.0;
};

inline UnbiasednessCheck check_mutually_unbiased(const Basis& b1, const Basis& b2,
                                                 double tol = kUnbiasedTolerance) {
    if (b1.dim() != b2.dim()) {
        throw DimensionError("cannot compare bases of different dimensions");
    }
    const double target = 1.0 / std::sqrt(static_cast<double>(b1.dim()));
    const Matrix overlaps = b1.matrix().adjoint() * b2.matrix();
    const double dev = (overlaps.cwiseAbs().array() - target).abs().maxCoeff();
    return {dev < tol, dev};
}

class MubSet {
public:
    explicit MubSet(std::vector<Basis> bases, double tol = kUnbiasedTolerance)
        : bases_(std::move(bases)) {
        if (bases_.empty()) throw SelectionError("empty MUB set");
        const int d = bases_.front().dim();
        if (bases_.size() < 2 || static_cast<int>(bases_.size()) > d + 1) {
            throw SelectionError("a MUB set in dimension " + std::to_string(d) +
                                 " holds between 2 and " + std::to_string(d + 1) + " bases");
        }
        for (std::size_t i = 0; i < bases_.size(); ++i) {
            if (bases_[i].dim() != d) throw DimensionError("mixed dimensions in MUB set");
            for (std::size_t j = i + 1; j < bases_.size(); ++j) {
                if (bases_[i].label() == bases_[j].label()) {
                    throw SelectionError(std::string("duplicate label ") +
                                         to_char(bases_[i].label()));
                }
                const auto check = check_mutually_unbiased(bases_[i], bases_[j], tol);
                if (!check.unbiased) {
                    throw SelectionError(std::string("bases ") + to_char(bases_[i].label()) +
                                         " and " + to_char(bases_[j].label()) +
                                         " are not mutually unbiased");
                }
            }
        }
    }

    int dim() const noexcept { return bases_.front().dim(); }
    int size() const noexcept { return static_cast<int>(bases_.size()); }
    const std::vector<Basis>& bases() const noexcept { return bases_; }

    std::vector<Label> labels() const {
        std::vector<Label> out;
        out.reserve(bases_.size());
        for (const auto& b : bases_) out.push_back(b.label());
        return out;
    }

    std::string label_string() const { return labels_to_string(labels()); }

    bool contains(Label l) const {
        return std::any_of(bases_.begin(), bases_.end(),
                           [l](const Basis& b) { return b.label() == l; });
    }

    const Basis& at(Label l) const {
        for (const auto& b : bases_) {
            if (b.label() == l) return b;
        }
        throw SelectionError(std::string("label ") + to_char(l) + " not in set");
    }

private:
    std::vector<Basis> bases_;
};

namespace detail {

// exp(2*pi*i*k/d) with the exponent reduced mod d before evaluation.
inline cplx root_of_unity(int d, int k) {
    const int e = ((k % d) + d) % d;
    const double angle = 2.0 * std::numbers::pi * e / d;
    return {std::cos(angle), std::sin(angle)};
}

template <int D>
Matrix from_exponents(const std::array<std::array<int, D>, D>& exps) {
    Matrix m(D, D);
    const double scale = 1.0 / std::sqrt(static_cast<double>(D));
    for (int r = 0; r < D; ++r) {
        for (int c = 0; c < D; ++c) m(r, c) = scale * root_of_unity(D, exps[r][c]);
    }
    return m;
}

inline std::vector<Basis> mub_bases_d3() {
    using E = std::array<std::array<int, 3>, 3>;
    std::vector<Basis> out;
    out.emplace_back(Label::A, Matrix::Identity(3, 3));
    out.emplace_back(Label::B, from_exponents<3>(E{{{0, 0, 0}, {0, 1, 2}, {0, 2, 1}}}));
    out.emplace_back(Label::C, from_exponents<3>(E{{{0, 0, 0}, {2, 1, 0}, {0, 1, 2}}}));
    out.emplace_back(Label::D, from_exponents<3>(E{{{0, 0, 0}, {1, 2, 0}, {0, 2, 1}}}));
    return out;
}

inline std::vector<Basis> mub_bases_d4() {
    const cplx i{0.0, 1.0};
    auto half = [](std::initializer_list<cplx> entries) {
        Matrix m(4, 4);
        auto it = entries.begin();
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) m(r, c) = 0.5 * *it++;
        }
        return m;
    };
    std::vector<Basis> out;
    out.emplace_back(Label::A, Matrix::Identity(4, 4));
    out.emplace_back(Label::B, half({1, 1, 1, 1,
                                     1, 1, -1, -1,
                                     1, -1, -1, 1,
                                     1, -1, 1, -1}));
    out.emplace_back(Label::C, half({1, 1, 1, 1,
                                     1, 1, -1, -1,
                                     -i, i, i, -i,
                                     i, -i, i, -i}));
    out.emplace_back(Label::D, half({1, 1, 1, 1,
                                     i, -i, i, -i,
                                     -1, -1, 1, 1,
                                     i, -i, -i, i}));
    out.emplace_back(Label::E, half({1, 1, 1, 1,
                                     i, -i, i, -i,
                                     i, -i, -i, i,
                                     -1, -1, 1, 1}));
    return out;
}

inline std::vector<Basis> mub_bases_d5() {
    using E = std::array<std::array<int, 5>, 5>;
    std::vector<Basis> out;
    out.emplace_back(Label::A, Matrix::Identity(5, 5));
    out.emplace_back(Label::B, from_exponents<5>(E{{{0, 0, 0, 0, 0},
                                                    {0, 1, 2, 3, 4},
                                                    {0, 2, 4, 1, 3},
                                                    {0, 3, 1, 4, 2},
                                                    {0, 4, 3, 2, 1}}}));
    out.emplace_back(Label::C, from_exponents<5>(E{{{0, 0, 0, 0, 0},
                                                    {1, 2, 3, 4, 0},
                                                    {4, 1, 3, 0, 2},
                                                    {4, 2, 0, 3, 1},
                                                    {1, 0, 4, 3, 2}}}));
    out.emplace_back(Label::D, from_exponents<5>(E{{{0, 0, 0, 0, 0},
                                                    {3, 4, 0, 1, 2},
                                                    {2, 4, 1, 3, 0},
                                                    {2, 0, 3, 1, 4},
                                                    {3, 2, 1, 0, 4}}}));
    out.emplace_back(Label::E, from_exponents<5>(E{{{0, 0, 0, 0, 0},
                                                    {2, 3, 4, 0, 1},
                                                    {3, 0, 2, 4, 1},
                                                    {3, 1, 4, 2, 0},
                                                    {2, 1, 0, 4, 3}}}));
    out.emplace_back(Label::F, from_exponents<5>(E{{{0, 0, 0, 0, 0},
                                                    {4, 0, 1, 2, 3},
                                                    {1, 3, 0, 2, 4},
                                                    {1, 4, 2, 0, 3},
                                                    {4, 3, 2, 1, 0}}}));
    return out;
}

}  // namespace detail

inline Basis build_computational_basis(int d) {
    require_supported_dim(d);
    return Basis(Label::A, Matrix::Identity(d, d));
}

/// All bases of the complete set as plain Basis values, without the
/// pairwise unbiasedness validation MubSet performs.
inline std::vector<Basis> full_mub_bases(int d) {
    require_supported_dim(d);
    switch (d) {
        case 3: return detail::mub_bases_d3();
        case 4: return detail::mub_bases_d4();
        default: return detail::mub_bases_d5();
    }
}

inline MubSet build_full_mub_set(int d) { return MubSet(full_mub_bases(d)); }

inline MubSet select_subset(const MubSet& full, std::span<const Label> labels) {
    std::vector<Basis> picked;
    picked.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (labels[i] == labels[j]) {
                throw SelectionError(std::string("duplicate label ") + to_char(labels[i]));
            }
        }
        if (!full.contains(labels[i])) {
            throw SelectionError(std::string("label ") + to_char(labels[i]) +
                                 " not present in the full set");
        }
        picked.push_back(full.at(labels[i]));
    }
    return MubSet(std::move(picked));
}

inline MubSet select_subset(const MubSet& full, std::string_view labels) {
    const auto parsed = parse_labels(labels);
    return select_subset(full, std::span<const Label>(parsed));
}

/// Independent uniform modulus in [0,1] and phase in [0, 2pi) per
/// coefficient, then normalized. Not Haar distributed.
inline PureState random_state(int d, std::uint64_t seed) {
    require_supported_dim(d);
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> modulus(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    Vector v(d);
    for (int j = 0; j < d; ++j) {
        const double r = modulus(rng);
        const double t = phase(rng);
        v(j) = std::polar(r, t);
    }
    if (v.norm() == 0.0) v(0) = 1.0;
    return PureState::normalized(std::move(v));
}

}  // namespace eurlab
