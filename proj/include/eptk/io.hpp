#pragma once

#include <charconv>
#include <ostream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "domain.hpp"
#include "jordan.hpp"
#include "metric.hpp"
#include "pseudospec.hpp"
#include "spectral.hpp"

namespace eptk::io {

using nlohmann::json;

/// Shortest round-trip decimal, '.' separator regardless of locale.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json matrix_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json params_json(const ParamVector& p) {
    json o = json::object();
    for (const auto& [k, v] : p.items()) o[k] = v;
    return o;
}

inline json to_json(const Spectrum& s) {
    json ev = json::array();
    for (const auto& e : s.eigenvalues) ev.push_back(complex_json(e));
    return {{"eigenvalues", ev}, {"cond", s.cond_numbers}, {"clusters", s.clusters}};
}

inline json to_json(const RealityClass& rc) {
    return {{"class", std::string(to_string(rc.tag))}, {"max_imag", rc.max_imag}, {"min_gap", rc.min_gap}};
}

inline json to_json(const EPOrderEstimate& e) {
    return {{"center", complex_json(e.center)}, {"algebraic_mult", e.algebraic_mult}, {"geometric_mult", e.geometric_mult}};
}

inline json to_json(const MetricCandidate& m) {
    return {{"entries", matrix_json(m.theta)}, {"min_eig", m.min_eig}, {"positive", m.positive}, {"weights", m.weights}};
}

inline json to_json(const DysonMap& d) {
    return {{"omega", matrix_json(d.omega)}, {"hermitized", matrix_json(d.hermitized)}, {"herm_residual", d.herm_residual}};
}

inline json to_json(const PerturbationProbe& p) {
    return {{"direction", matrix_json(p.direction)},
            {"lambda_range", json::array({p.lambda_range.first, p.lambda_range.second})},
            {"center", complex_json(p.center)},
            {"side_plus_real", p.side_plus_real},
            {"side_minus_real", p.side_minus_real},
            {"exponent_fit", p.exponent_fit},
            {"fit_r2", p.fit_r2},
            {"lambdas", p.lambdas},
            {"deviations", p.deviations}};
}

inline json vertices_json(const std::vector<std::pair<ParamVector, EPOrderEstimate>>& vertices) {
    json out = json::array();
    for (const auto& [p, est] : vertices) {
        json v = to_json(est);
        v["params"] = params_json(p);
        out.push_back(std::move(v));
    }
    return out;
}

/// Header "<axis...>,class,max_imag,min_gap", one row per node, first axis
/// slowest.
inline void write_domain_csv(std::ostream& os, const DomainGrid& grid) {
    for (const auto& a : grid.slice.axes) os << a << ',';
    os << "class,max_imag,min_gap\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (double x : grid.coords_of(i)) os << fmt(x) << ',';
        const auto& c = grid.cells[i];
        os << to_string(c.tag) << ',' << fmt(c.max_imag) << ',' << fmt(c.min_gap) << '\n';
    }
}

inline void write_pseudospec_csv(std::ostream& os, const PseudospectrumMap& map) {
    os << "re,im,value\n";
    for (int iy = 0; iy < map.ny; ++iy)
        for (int ix = 0; ix < map.nx; ++ix) {
            const Complex z = map.z(ix, iy);
            os << fmt(z.real()) << ',' << fmt(z.imag()) << ',' << fmt(map.at(ix, iy)) << '\n';
        }
}

/// gnuplot pm3d layout: "re im value" triples, blank line between scan lines.
inline void write_pseudospec_gnuplot(std::ostream& os, const PseudospectrumMap& map) {
    for (int iy = 0; iy < map.ny; ++iy) {
        for (int ix = 0; ix < map.nx; ++ix) {
            const Complex z = map.z(ix, iy);
            os << fmt(z.real()) << ' ' << fmt(z.imag()) << ' ' << fmt(map.at(ix, iy)) << '\n';
        }
        os << '\n';
    }
}

inline void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
    std::vector<int> cluster_of(s.eigenvalues.size(), -1);
    for (std::size_t c = 0; c < s.clusters.size(); ++c)
        for (int i : s.clusters[c]) cluster_of[static_cast<std::size_t>(i)] = static_cast<int>(c);
    os << "index,re,im,cond,cluster\n";
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
        os << i << ',' << fmt(s.eigenvalues[i].real()) << ',' << fmt(s.eigenvalues[i].imag()) << ','
           << fmt(s.cond_numbers[i]) << ',' << cluster_of[i] << '\n';
}

} // namespace eptk::io
