#pragma once

// JSON and CSV encodings. Complex numbers are [re, im] pairs and matrices
// are row-major arrays of rows.

#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eurlab/entropy.hpp"
#include "eurlab/minimizer.hpp"
#include "eurlab/optstates.hpp"
#include "eurlab/povmsim.hpp"
#include "eurlab/qstate.hpp"

namespace eurlab {

using json = nlohmann::json;

/// Shortest round-trippable decimal form used by every text output.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Twelve decimals, for CSV tables.
inline std::string format_fixed(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12f", v);
    return buf;
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("complex entry must be [re, im]");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

inline Vector vector_from_json(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
            throw ConfigError("matrix must be square");
        }
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

inline json to_json(const Basis& b) {
    return {{"label", std::string(1, to_char(b.label()))}, {"dim", b.dim()},
            {"matrix", matrix_to_json(b.matrix())}};
}

inline Basis basis_from_json(const json& j) {
    const auto label = j.at("label").get<std::string>();
    if (label.size() != 1) throw ConfigError("basis label must be a single letter");
    return Basis(label_from_char(label[0]), matrix_from_json(j.at("matrix")));
}

inline json to_json(const MubSet& s) {
    json labels = json::array();
    json bases = json::array();
    for (const auto& b : s.bases()) {
        labels.push_back(std::string(1, to_char(b.label())));
        bases.push_back(to_json(b));
    }
    return {{"dim", s.dim()}, {"labels", labels}, {"bases", bases}};
}

/// Reads the "bases" array without checking mutual unbiasedness.
inline std::vector<Basis> bases_from_json(const json& j) {
    std::vector<Basis> out;
    const json& arr = j.is_array() ? j : j.at("bases");
    for (const auto& b : arr) out.push_back(basis_from_json(b));
    return out;
}

inline MubSet mub_set_from_json(const json& j) { return MubSet(bases_from_json(j)); }

inline json to_json(const PureState& s) { return vector_to_json(s.amplitudes()); }

inline json to_json(const BoundCatalogEntry& e) {
    return {{"dim", e.dim},           {"m", e.m},         {"value", e.value},
            {"variant", to_string(e.variant)}, {"exact", e.exact}, {"expression", e.expression},
            {"tolerance", e.tolerance()}};
}

inline json to_json(const EntropyReport& r) {
    json ent = json::object();
    for (const auto& [label, h] : r.entropies) ent[std::string(1, to_char(label))] = h;
    return {{"state_id", r.state_id}, {"entropies", ent}, {"sum", r.sum},
            {"bound", to_json(r.bound)}, {"gap", r.gap}};
}

inline std::string entropy_report_csv_header() {
    return "state_id,H_A,H_B,H_C,H_D,H_E,H_F,sum,bound,gap";
}

inline std::string to_csv_row(const EntropyReport& r) {
    std::string cols[6];
    for (const auto& [label, h] : r.entropies) cols[index_of(label)] = format_fixed(h);
    std::string row = r.state_id;
    for (const auto& c : cols) row += "," + c;
    row += "," + format_fixed(r.sum) + "," + format_fixed(r.bound.value) + "," + format_fixed(r.gap);
    return row;
}

inline json to_json(const CertifiedBound& cb) {
    json labels = json::array();
    for (Label l : cb.labels) labels.push_back(std::string(1, to_char(l)));
    json out{{"labels", labels},
             {"dim", cb.dim},
             {"m", cb.m},
             {"min_value", cb.min_value},
             {"restarts_converged", cb.restarts_converged},
             {"starts", cb.starts},
             {"best_start", cb.best_start},
             {"catalog_gap", cb.catalog_gap},
             {"below_catalog", cb.below_catalog}};
    out["argmin"] = cb.argmin ? to_json(*cb.argmin) : json(nullptr);
    out["catalog"] = cb.catalog ? to_json(*cb.catalog) : json(nullptr);
    return out;
}

inline json to_json(const Povm& p) {
    json elements = json::array();
    for (const auto& e : p.elements()) elements.push_back(matrix_to_json(e));
    return {{"dim", p.dim()}, {"elements", elements}};
}

/// Elements are the m^gamma_ij coefficient matrices in the computational basis.
inline Povm povm_from_json(const json& j) {
    std::vector<Matrix> elements;
    for (const auto& e : j.at("elements")) elements.push_back(matrix_from_json(e));
    return Povm(std::move(elements));
}

inline json to_json(const PiFraction& f) { return {{"num", f.num}, {"den", f.den}, {"text", f.to_string()}}; }

inline json to_json(const OptimalState& s) {
    json labels = json::array();
    for (Label l : s.spec.labels) labels.push_back(std::string(1, to_char(l)));
    json params;
    std::string family;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, TwoTermParams>) {
                family = "two_term";
                params = {{"j1", p.j1}, {"j2", p.j2}, {"phase", to_json(p.phase)}};
            } else if constexpr (std::is_same_v<T, PhaseTripleParams>) {
                family = "equal_modulus_phases";
                params = {{"phases", json::array({to_json(p.phases[0]), to_json(p.phases[1]),
                                                  to_json(p.phases[2])})}};
            } else if constexpr (std::is_same_v<T, ModulusPhaseParams>) {
                family = "null_coefficient";
                json phases = json::array();
                for (const auto& ph : p.phases) phases.push_back(to_json(ph));
                params = {{"seed_moduli", p.moduli}, {"seed_phases", phases}};
            } else if constexpr (std::is_same_v<T, CertifiedArgminParams>) {
                family = "certified_argmin";
                params = {{"seed", p.seed}, {"restarts", p.restarts}};
            } else {
                family = "eigenstate";
                params = {{"basis", std::string(1, to_char(p.basis))}, {"index", p.index}};
            }
        },
        s.spec.parameters);
    return {{"id", s.id},         {"dim", s.spec.dim}, {"m", s.spec.m}, {"labels", labels},
            {"family", family}, {"parameters", params}, {"amplitudes", to_json(s.state)}};
}

}  // namespace eurlab
