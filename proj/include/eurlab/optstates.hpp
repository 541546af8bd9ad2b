#pragma once

// Closed-form families of states that saturate the entropy-sum bounds.
//
// d=3: (|j1> + e^{i phi}|j2>)/sqrt2 with phi in {pi/3, pi, 5pi/3}.
// d=4: two-term superpositions for triples containing A, equal-modulus
//      phase states for triples without A; quadruples reuse the states of
//      their sub-triples.
// d=5: eigenstates (m=3, class1 set), a null-coefficient family with
//      pairwise equal moduli (m=4, 5) and two-term superpositions (m=6).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "eurlab/descent.hpp"
#include "eurlab/entropy.hpp"
#include "eurlab/qstate.hpp"

namespace eurlab {

/// A phase stored as num/den * pi.
struct PiFraction {
    int num = 0;
    int den = 1;

    double radians() const { return std::numbers::pi * num / den; }
    std::string to_string() const {
        if (num == 0) return "0";
        return std::to_string(num) + (den == 1 ? "" : "/" + std::to_string(den)) + "pi";
    }
    friend bool operator==(const PiFraction&, const PiFraction&) = default;
};

struct TwoTermParams {
    int j1 = 0;
    int j2 = 1;
    PiFraction phase;
};

/// (1/2) sum_j e^{i phi_j}|j> with phi_0 = 0.
struct PhaseTripleParams {
    std::array<PiFraction, 3> phases;
};

/// sum_j psi_j e^{i phi_j}|j>. Moduli are the seeding values before
/// normalization; the state itself carries the refined amplitudes.
struct ModulusPhaseParams {
    std::array<double, 5> moduli{};
    std::array<PiFraction, 5> phases{};
};

struct EigenstateParams {
    Label basis = Label::A;
    int index = 0;
};

/// A state found by minimization rather than taken from a table.
struct CertifiedArgminParams {
    std::uint64_t seed = 0;
    int restarts = 0;
};

using FamilyParameters = std::variant<TwoTermParams, PhaseTripleParams, ModulusPhaseParams,
                                      EigenstateParams, CertifiedArgminParams>;

struct OptimalFamilySpec {
    int dim = 0;
    int m = 0;
    std::vector<Label> labels;
    FamilyParameters parameters;
};

struct OptimalState {
    std::string id;
    OptimalFamilySpec spec;
    PureState state;
};

inline std::vector<PureState> states_of(const std::vector<OptimalState>& family) {
    std::vector<PureState> out;
    out.reserve(family.size());
    for (const auto& s : family) out.push_back(s.state);
    return out;
}

inline PureState two_term_state(int d, const TwoTermParams& p) {
    Vector v = Vector::Zero(d);
    v(p.j1) = 1.0 / std::sqrt(2.0);
    v(p.j2) = std::polar(1.0 / std::sqrt(2.0), p.phase.radians());
    return PureState::normalized(std::move(v));
}

inline PureState phase_triple_state(const PhaseTripleParams& p) {
    Vector v(4);
    v(0) = 0.5;
    for (int j = 0; j < 3; ++j) v(j + 1) = std::polar(0.5, p.phases[j].radians());
    return PureState::normalized(std::move(v));
}

inline PureState modulus_phase_state(const ModulusPhaseParams& p) {
    Vector v(5);
    for (int j = 0; j < 5; ++j) v(j) = std::polar(p.moduli[j], p.phases[j].radians());
    return PureState::normalized(std::move(v));
}

namespace detail {

inline std::string two_term_id(int d, const TwoTermParams& p) {
    return "d" + std::to_string(d) + "-opt-" + std::to_string(p.j1) + std::to_string(p.j2) +
           "-" + p.phase.to_string();
}

inline std::vector<Label> sorted_labels(std::span<const Label> labels) {
    std::vector<Label> v(labels.begin(), labels.end());
    std::sort(v.begin(), v.end());
    return v;
}

struct D4PairRow {
    const char* triple;
    std::array<const char*, 2> quadruples;
    std::array<std::array<int, 2>, 2> pairs;
    std::array<PiFraction, 2> phases;
};

// Triples that include the computational basis.
inline const std::array<D4PairRow, 6>& d4_pair_table() {
    static const std::array<D4PairRow, 6> table{{
        {"ABC", {"ABCD", "ABCE"}, {{{0, 1}, {2, 3}}}, {PiFraction{0, 1}, PiFraction{1, 1}}},
        {"ABD", {"ABCD", "ABDE"}, {{{0, 2}, {1, 3}}}, {PiFraction{0, 1}, PiFraction{1, 1}}},
        {"ABE", {"ABCE", "ABDE"}, {{{0, 3}, {1, 2}}}, {PiFraction{0, 1}, PiFraction{1, 1}}},
        {"ACD", {"ABCD", "ACDE"}, {{{0, 3}, {1, 2}}}, {PiFraction{1, 2}, PiFraction{-1, 2}}},
        {"ACE", {"ABCE", "ACDE"}, {{{0, 2}, {1, 3}}}, {PiFraction{1, 2}, PiFraction{-1, 2}}},
        {"ADE", {"ABDE", "ACDE"}, {{{0, 1}, {2, 3}}}, {PiFraction{1, 2}, PiFraction{-1, 2}}},
    }};
    return table;
}

struct D4PhaseRow {
    const char* triple;
    std::array<const char*, 2> quadruples;
    std::array<std::array<PiFraction, 3>, 4> phases;
};

// Triples without the computational basis; phi_0 = 0.
inline const std::array<D4PhaseRow, 4>& d4_phase_table() {
    constexpr PiFraction z{0, 1};
    constexpr PiFraction pi{1, 1};
    constexpr PiFraction hp{1, 2};
    constexpr PiFraction hm{-1, 2};
    static const std::array<D4PhaseRow, 4> table{{
        {"BCD", {"ABCD", "BCDE"}, {{{hp, hp, z}, {hm, hm, z}, {hp, hm, pi}, {hm, hp, pi}}}},
        {"BCE", {"ABCE", "BCDE"}, {{{hp, z, hp}, {hm, z, hm}, {hp, pi, hm}, {hm, pi, hp}}}},
        {"BDE", {"ABDE", "BCDE"}, {{{z, hp, hp}, {z, hm, hm}, {pi, hp, hm}, {pi, hm, hp}}}},
        {"CDE", {"ACDE", "BCDE"}, {{{pi, z, z}, {z, pi, z}, {z, z, pi}, {pi, pi, pi}}}},
    }};
    return table;
}

inline std::vector<OptimalState> d4_pair_row_states(const D4PairRow& row) {
    std::vector<OptimalState> out;
    const auto labels = parse_labels(row.triple);
    for (const auto& pair : row.pairs) {
        for (const auto& phase : row.phases) {
            TwoTermParams p{pair[0], pair[1], phase};
            out.push_back({two_term_id(4, p) + "-" + row.triple, {4, 3, labels, p},
                           two_term_state(4, p)});
        }
    }
    return out;
}

inline std::vector<OptimalState> d4_phase_row_states(const D4PhaseRow& row) {
    std::vector<OptimalState> out;
    const auto labels = parse_labels(row.triple);
    for (const auto& phases : row.phases) {
        PhaseTripleParams p{phases};
        std::string id = "d4-opt-phases";
        for (const auto& ph : phases) id += "-" + ph.to_string();
        out.push_back({id + "-" + row.triple, {4, 3, labels, p}, phase_triple_state(p)});
    }
    return out;
}

}  // namespace detail

inline std::vector<OptimalState> optimal_states_d3() {
    std::vector<OptimalState> out;
    const std::array<PiFraction, 3> phases{PiFraction{1, 3}, PiFraction{1, 1}, PiFraction{5, 3}};
    for (int j1 = 0; j1 < 3; ++j1) {
        for (int j2 = j1 + 1; j2 < 3; ++j2) {
            for (const auto& ph : phases) {
                TwoTermParams p{j1, j2, ph};
                out.push_back({detail::two_term_id(3, p), {3, 3, parse_labels("ABC"), p},
                               two_term_state(3, p)});
            }
        }
    }
    return out;
}

inline std::vector<OptimalState> optimal_states_d4_with_A(std::span<const Label> labels) {
    const std::string key = labels_to_string(detail::sorted_labels(labels));
    for (const auto& row : detail::d4_pair_table()) {
        if (key == row.triple) return detail::d4_pair_row_states(row);
    }
    throw SelectionError("no d=4 optimal-state table entry for triple " + key +
                         " containing A");
}

inline std::vector<OptimalState> optimal_states_d4_without_A(std::span<const Label> labels) {
    const std::string key = labels_to_string(detail::sorted_labels(labels));
    for (const auto& row : detail::d4_phase_table()) {
        if (key == row.triple) return detail::d4_phase_row_states(row);
    }
    throw SelectionError("no d=4 optimal-state table entry for triple " + key +
                         " without A");
}

/// Optimal states of any d=4 triple.
inline std::vector<OptimalState> optimal_states_d4_triple(std::span<const Label> labels) {
    const auto sorted = detail::sorted_labels(labels);
    if (!sorted.empty() && sorted.front() == Label::A) return optimal_states_d4_with_A(sorted);
    return optimal_states_d4_without_A(sorted);
}

/// Union of the states of every triple whose table row lists this quadruple.
inline std::vector<OptimalState> optimal_states_d4_quadruple(std::span<const Label> labels) {
    const std::string key = labels_to_string(detail::sorted_labels(labels));
    std::vector<OptimalState> out;
    auto append = [&](std::vector<OptimalState> states) {
        for (auto& s : states) {
            s.spec.m = 4;
            s.spec.labels = parse_labels(key);
            out.push_back(std::move(s));
        }
    };
    for (const auto& row : detail::d4_pair_table()) {
        if (key == row.quadruples[0] || key == row.quadruples[1]) {
            append(detail::d4_pair_row_states(row));
        }
    }
    for (const auto& row : detail::d4_phase_table()) {
        if (key == row.quadruples[0] || key == row.quadruples[1]) {
            append(detail::d4_phase_row_states(row));
        }
    }
    if (out.empty()) throw SelectionError("no d=4 optimal states listed for quadruple " + key);
    return out;
}

/// All 40 tabulated d=4 states; they also minimize the complete set.
inline std::vector<OptimalState> optimal_states_d4_complete() {
    std::vector<OptimalState> out;
    for (const auto& row : detail::d4_pair_table()) {
        for (auto& s : detail::d4_pair_row_states(row)) out.push_back(std::move(s));
    }
    for (const auto& row : detail::d4_phase_table()) {
        for (auto& s : detail::d4_phase_row_states(row)) out.push_back(std::move(s));
    }
    for (auto& s : out) {
        s.spec.m = 5;
        s.spec.labels = parse_labels("ABCDE");
    }
    return out;
}

/// Eigenstates (columns) of the named bases of the complete set.
inline std::vector<OptimalState> eigenstates(int d, std::span<const Label> labels) {
    const auto bases = full_mub_bases(d);
    std::vector<OptimalState> out;
    for (Label l : labels) {
        const auto it = std::find_if(bases.begin(), bases.end(),
                                     [l](const Basis& b) { return b.label() == l; });
        if (it == bases.end()) throw SelectionError(std::string("no basis ") + to_char(l));
        for (int j = 0; j < d; ++j) {
            out.push_back({"d" + std::to_string(d) + "-eig-" + to_char(l) + std::to_string(j),
                           {d, static_cast<int>(labels.size()),
                            std::vector<Label>(labels.begin(), labels.end()),
                            EigenstateParams{l, j}},
                           it->column(j)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Refinement

struct RefineOptions {
    double tolerance = 1e-12;
    double acceptance_window = 0.05;  // bits from the cell bound
    int max_iterations = 5000;
};

/// Local descent from a candidate that is already close to its cell bound.
/// Returns the candidate itself when no decrease beyond the tolerance is
/// found. The result is phase-aligned with the candidate.
inline PureState refine_optimal_state(const PureState& candidate, const MubSet& set,
                                      const RefineOptions& opts = {},
                                      std::optional<BoundVariant> variant = std::nullopt) {
    const auto bound = bound_lookup(set.dim(), set.size(), variant);
    const EntropyObjective objective(set);
    const double start = objective.value(candidate.amplitudes());
    if (std::abs(start - bound.value) > opts.acceptance_window) {
        throw RefinementRejected("candidate entropy sum " + std::to_string(start) +
                                 " is not within " + std::to_string(opts.acceptance_window) +
                                 " bits of the bound " + bound.expression);
    }
    DescentOptions dopts;
    dopts.max_iterations = opts.max_iterations;
    const auto result = local_descent(objective, extract_parameters(candidate), dopts);
    if (!(result.value < start - opts.tolerance)) return candidate;

    const PureState refined = parametrize_state(result.params);
    const cplx overlap = inner(refined, candidate);
    if (std::norm(overlap) < 0.99) {
        throw RefinementRejected("refinement drifted away from the candidate (fidelity " +
                                 std::to_string(std::norm(overlap)) + ")");
    }
    const cplx align = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0);
    return PureState::normalized(refined.amplitudes() * align);
}

// ---------------------------------------------------------------------------
// d = 5

namespace detail {

// Seeds every modulus/phase assignment compatible with "one null
// coefficient, the other four pairwise equal, phases on the pi/5 grid",
// keeps the lowest-scoring seeds, refines them and returns the ones whose
// refined sum matches the best refined value.
inline std::vector<OptimalState> build_d5_null_family(const char* set_labels, double big,
                                                      double small) {
    const MubSet set = select_subset(build_full_mub_set(5), set_labels);
    const EntropyObjective objective(set);
    struct Seed {
        ModulusPhaseParams params;
        double value;
    };
    std::vector<Seed> seeds;
    for (int zero = 0; zero < 5; ++zero) {
        std::array<int, 4> rest{};
        for (int j = 0, k = 0; j < 5; ++j) {
            if (j != zero) rest[k++] = j;
        }
        for (int a = 0; a < 4; ++a) {
            for (int b = a + 1; b < 4; ++b) {
                ModulusPhaseParams p;
                for (int r : rest) p.moduli[r] = small;
                p.moduli[rest[a]] = big;
                p.moduli[rest[b]] = big;
                p.moduli[zero] = 0.0;
                // Phase of the first nonzero coefficient fixed to zero.
                for (int k1 = 0; k1 < 10; ++k1) {
                    for (int k2 = 0; k2 < 10; ++k2) {
                        for (int k3 = 0; k3 < 10; ++k3) {
                            const std::array<int, 3> ks{k1, k2, k3};
                            for (auto& ph : p.phases) ph = PiFraction{0, 1};
                            for (int i = 0; i < 3; ++i) {
                                const int k = ks[i] > 5 ? ks[i] - 10 : ks[i];
                                p.phases[rest[i + 1]] = PiFraction{k, 5};
                            }
                            const PureState s = modulus_phase_state(p);
                            seeds.push_back({p, objective.value(s.amplitudes())});
                        }
                    }
                }
            }
        }
    }
    double grid_min = seeds.front().value;
    for (const auto& s : seeds) grid_min = std::min(grid_min, s.value);

    std::vector<std::pair<OptimalState, double>> refined;
    const int m = set.size();
    for (const auto& seed : seeds) {
        if (seed.value > grid_min + 1e-3) continue;
        const PureState candidate = modulus_phase_state(seed.params);
        PureState r = refine_optimal_state(candidate, set);
        const double v = objective.value(r.amplitudes());
        std::string id = "d5-opt-m" + std::to_string(m);
        for (int j = 0; j < 5; ++j) {
            id += "-";
            id += seed.params.moduli[j] == 0.0 ? "0" : (seed.params.moduli[j] == big ? "L" : "S");
            id += seed.params.moduli[j] == 0.0 ? "" : seed.params.phases[j].to_string();
        }
        refined.push_back({OptimalState{id, {5, m, set.labels(), seed.params}, std::move(r)}, v});
    }
    double best = refined.front().second;
    for (const auto& r : refined) best = std::min(best, r.second);

    std::vector<OptimalState> out;
    for (auto& [state, value] : refined) {
        if (value > best + 1e-6) continue;
        const bool duplicate = std::any_of(out.begin(), out.end(), [&](const OptimalState& o) {
            return fidelity(o.state, state.state) > 1.0 - 1e-9;
        });
        if (!duplicate) out.push_back(std::move(state));
    }
    return out;
}

}  // namespace detail

/// Every refined null-coefficient optimum for ABCD (m=4) or ABCDE (m=5),
/// in canonical seed order.
inline const std::vector<OptimalState>& optimal_family_d5(int m) {
    if (m == 4) {
        static const std::vector<OptimalState> family =
            detail::build_d5_null_family("ABCD", 0.68, 0.19);
        return family;
    }
    if (m == 5) {
        static const std::vector<OptimalState> family =
            detail::build_d5_null_family("ABCDE", 0.70, 0.11);
        return family;
    }
    throw SelectionError("the null-coefficient family exists for m=4 and m=5 only");
}

inline constexpr int kD5FamilyReportedCountM4 = 9;
inline constexpr int kD5FamilyReportedCountM5 = 5;

/// Optimal states for the d=5 sets ABC (m=3), ABCD, ABCDE and ABCDEF.
/// For m=4 and m=5 the first nine (five) members of the refined family
/// are returned.
inline std::vector<OptimalState> optimal_states_d5(int m) {
    switch (m) {
        case 3: {
            const auto labels = parse_labels("ABC");
            return eigenstates(5, labels);
        }
        case 4:
        case 5: {
            const auto& family = optimal_family_d5(m);
            const std::size_t n = static_cast<std::size_t>(
                m == 4 ? kD5FamilyReportedCountM4 : kD5FamilyReportedCountM5);
            return {family.begin(), family.begin() + static_cast<long>(std::min(n, family.size()))};
        }
        case 6: {
            std::vector<OptimalState> out;
            const std::array<int, 5> ks{1, -1, 3, -3, 5};
            for (int j1 = 0; j1 < 5; ++j1) {
                for (int j2 = j1 + 1; j2 < 5; ++j2) {
                    for (int k : ks) {
                        TwoTermParams p{j1, j2, PiFraction{k, 5}};
                        out.push_back({detail::two_term_id(5, p),
                                       {5, 6, parse_labels("ABCDEF"), p},
                                       two_term_state(5, p)});
                    }
                }
            }
            return out;
        }
        default:
            throw SelectionError("d=5 optimal states exist for m in 3..6, got " +
                                 std::to_string(m));
    }
}

/// Every catalog state in dimension d: optimal families plus the
/// eigenstates of all bases. Used as warm starts by the minimizer.
inline std::vector<PureState> catalog_states(int d) {
    require_supported_dim(d);
    std::vector<PureState> out;
    auto add = [&out](const std::vector<OptimalState>& v) {
        for (const auto& s : v) out.push_back(s.state);
    };
    std::vector<Label> all;
    for (const auto& b : full_mub_bases(d)) all.push_back(b.label());
    add(eigenstates(d, all));
    if (d == 3) {
        add(optimal_states_d3());
    } else if (d == 4) {
        add(optimal_states_d4_complete());
    } else {
        add(optimal_family_d5(4));
        add(optimal_family_d5(5));
        add(optimal_states_d5(6));
    }
    return out;
}

}  // namespace eurlab
