#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "matrix.hpp"

namespace eptk {

enum class ModelTag { FourByFour, WDW, BoseHubbard, EPChain, HOAnalytic };

/// Model family plus its size parameter (BH dimension, chain length, HO
/// truncation in level pairs). Ignored for the fixed-size families.
struct ModelId {
    ModelTag tag = ModelTag::FourByFour;
    int dim_param = 0;
};

/// Named real parameters, in insertion order.
class ParamVector {
public:
    ParamVector() = default;
    ParamVector(std::initializer_list<std::pair<std::string, double>> init) : items_(init) {}

    double get(std::string_view name) const {
        for (const auto& [k, v] : items_)
            if (k == name) return v;
        throw ArgumentError("missing parameter '" + std::string(name) + "'");
    }
    bool has(std::string_view name) const {
        for (const auto& [k, v] : items_)
            if (k == name) return true;
        return false;
    }
    void set(std::string_view name, double value) {
        for (auto& [k, v] : items_)
            if (k == name) {
                v = value;
                return;
            }
        items_.emplace_back(std::string(name), value);
    }

    const std::vector<std::pair<std::string, double>>& items() const noexcept { return items_; }
    bool operator==(const ParamVector&) const = default;

private:
    std::vector<std::pair<std::string, double>> items_;
};

// ---------------------------------------------------------------------------
// Individual families

/// Real 4x4 two-parameter model with diagonal (-3,-1,1,3) and antisymmetric
/// b, a, b couplings along the first off-diagonals.
inline ComplexMatrix eval_four_by_four(double a, double b) {
    ComplexMatrix h = ComplexMatrix::Zero(4, 4);
    h(0, 0) = -3.0;
    h(1, 1) = -1.0;
    h(2, 2) = 1.0;
    h(3, 3) = 3.0;
    h(0, 1) = b;
    h(1, 0) = -b;
    h(1, 2) = a;
    h(2, 1) = -a;
    h(2, 3) = b;
    h(3, 2) = -b;
    return h;
}

/// E_{s1,s2} = s1 * 1/2 sqrt(20 - 4b^2 - 2a^2 + s2 * 2 sqrt(R)), principal
/// branches. Order: (+,+), (+,-), (-,+), (-,-).
inline std::array<Complex, 4> four_by_four_eigs_closed(double a, double b) {
    const double a2 = a * a, b2 = b * b;
    const Complex inner = std::sqrt(Complex(64.0 - 64.0 * b2 + 16.0 * a2 + 4.0 * b2 * a2 + a2 * a2, 0.0));
    const Complex outer = 20.0 - 4.0 * b2 - 2.0 * a2;
    const Complex hi = 0.5 * std::sqrt(outer + 2.0 * inner);
    const Complex lo = 0.5 * std::sqrt(outer - 2.0 * inner);
    return {hi, lo, -hi, -lo};
}

inline constexpr double kWdwTauLimit = 300.0;

/// [[0, e^{2 tau}], [1, 0]].
inline ComplexMatrix eval_wdw(double tau) {
    if (!(std::abs(tau) <= kWdwTauLimit)) throw ArgumentError("wdw: |tau| must be <= 300");
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 1) = std::exp(2.0 * tau);
    h(1, 0) = 1.0;
    return h;
}

/// Two-mode Bose-Hubbard Hamiltonian with on-site energy i*gamma, restricted
/// to N-1 particles (matrix dimension N). Basis ordered by decreasing
/// first-mode occupation.
inline ComplexMatrix eval_bose_hubbard(int n, double gamma, double c, double v) {
    if (n < 2) throw ArgumentError("bose-hubbard: N must be >= 2");
    ComplexMatrix h = ComplexMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const double m = static_cast<double>(n - 1 - 2 * k);
        h(k, k) = Complex(0.5 * c * m * m, -gamma * m);
    }
    for (int k = 0; k + 1 < n; ++k) {
        const double t = v * std::sqrt(static_cast<double>((k + 1) * (n - 1 - k)));
        h(k, k + 1) = t;
        h(k + 1, k) = t;
    }
    return h;
}

/// Nilpotent real tridiagonal chain: diagonal N+1-2k, superdiagonal
/// +sqrt(k(N-k)), subdiagonal -sqrt(k(N-k)).
inline ComplexMatrix eval_ep_chain(int n) {
    if (n < 2) throw ArgumentError("ep-chain: N must be >= 2");
    ComplexMatrix h = ComplexMatrix::Zero(n, n);
    for (int k = 1; k <= n; ++k) h(k - 1, k - 1) = static_cast<double>(n + 1 - 2 * k);
    for (int k = 1; k < n; ++k) {
        const double t = std::sqrt(static_cast<double>(k * (n - k)));
        h(k - 1, k) = t;
        h(k, k - 1) = -t;
    }
    return h;
}

/// Harmonic-oscillator level pairs (4n+2-(2L+1), 4n+2+(2L+1)), n = 0..n_max.
inline std::vector<std::pair<double, double>> ho_levels(double l, int n_max) {
    if (n_max < 0) throw ArgumentError("ho: n_max must be >= 0");
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    const double split = 2.0 * l + 1.0;
    for (int n = 0; n <= n_max; ++n) {
        const double base = 4.0 * n + 2.0;
        out.emplace_back(base - split, base + split);
    }
    return out;
}

/// L > -1/2 with the half-integers -1/2, 1/2, 3/2, ... removed.
inline bool ho_domain_membership(double l) {
    if (!(l > -0.5)) return false;
    const double twice = 2.0 * l;
    return std::fmod(twice, 2.0) != 1.0;
}

/// Diagonal matrix of the HO levels for n < pairs; a spectral stand-in that
/// lets the HO family flow through the matrix-based pipelines.
inline ComplexMatrix eval_ho(double l, int pairs) {
    if (pairs < 1) throw ArgumentError("ho: truncation must be >= 1 level pair");
    const auto levels = ho_levels(l, pairs - 1);
    ComplexMatrix h = ComplexMatrix::Zero(2 * pairs, 2 * pairs);
    for (int n = 0; n < pairs; ++n) {
        h(2 * n, 2 * n) = levels[static_cast<std::size_t>(n)].first;
        h(2 * n + 1, 2 * n + 1) = levels[static_cast<std::size_t>(n)].second;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Catalog

struct ModelInfo {
    ModelTag tag;
    std::string_view id;
    std::vector<std::pair<std::string_view, double>> params; // name, default
    int default_dim;
};

inline const std::vector<ModelInfo>& model_catalog() {
    static const std::vector<ModelInfo> catalog = {
        {ModelTag::FourByFour, "four-by-four", {{"a", 0.0}, {"b", 0.0}}, 4},
        {ModelTag::WDW, "wdw", {{"tau", 0.0}}, 2},
        {ModelTag::BoseHubbard, "bose-hubbard", {{"gamma", 0.0}, {"c", 0.0}, {"v", 1.0}}, 6},
        {ModelTag::EPChain, "ep-chain", {}, 3},
        {ModelTag::HOAnalytic, "ho", {{"L", 0.0}}, 3},
    };
    return catalog;
}

inline const ModelInfo& model_info(ModelTag tag) {
    for (const auto& m : model_catalog())
        if (m.tag == tag) return m;
    throw ArgumentError("unknown model tag");
}

inline ModelId parse_model(std::string_view id, int dim_param = 0) {
    for (const auto& m : model_catalog())
        if (m.id == id) return {m.tag, dim_param > 0 ? dim_param : m.default_dim};
    throw ArgumentError("unknown model '" + std::string(id) + "'");
}

inline std::string_view model_name(const ModelId& id) { return model_info(id.tag).id; }

/// Fills in defaults and rejects unknown or non-finite parameters.
inline ParamVector complete_params(const ModelId& id, const ParamVector& given) {
    const auto& info = model_info(id.tag);
    for (const auto& [k, v] : given.items()) {
        bool known = false;
        for (const auto& [name, def] : info.params) known = known || name == k;
        if (!known)
            throw ArgumentError("model '" + std::string(info.id) + "' has no parameter '" + k + "'");
        if (!std::isfinite(v)) throw ArgumentError("parameter '" + k + "' is not finite");
    }
    ParamVector out;
    for (const auto& [name, def] : info.params) out.set(name, given.has(name) ? given.get(name) : def);
    return out;
}

inline ComplexMatrix evaluate(const ModelId& id, const ParamVector& given) {
    const ParamVector p = complete_params(id, given);
    switch (id.tag) {
    case ModelTag::FourByFour: return eval_four_by_four(p.get("a"), p.get("b"));
    case ModelTag::WDW: return eval_wdw(p.get("tau"));
    case ModelTag::BoseHubbard: return eval_bose_hubbard(id.dim_param, p.get("gamma"), p.get("c"), p.get("v"));
    case ModelTag::EPChain: return eval_ep_chain(id.dim_param);
    case ModelTag::HOAnalytic: return eval_ho(p.get("L"), id.dim_param);
    }
    throw ArgumentError("unknown model tag");
}

/// dH/d(param) by central difference; exact for the families that are
/// polynomial of degree <= 2 in their parameters.
inline ComplexMatrix parameter_derivative(const ModelId& id, const ParamVector& at, std::string_view name) {
    const ParamVector p = complete_params(id, at);
    const double x = p.get(name);
    const double h = 1e-3 * std::max(1.0, std::abs(x));
    ParamVector up = p, dn = p;
    up.set(name, x + h);
    dn.set(name, x - h);
    return (evaluate(id, up) - evaluate(id, dn)) / (2.0 * h);
}

} // namespace eptk
