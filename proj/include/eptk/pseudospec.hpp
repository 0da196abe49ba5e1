#pragma once

#include <cmath>
#include <vector>

#include "metric.hpp"
#include "parallel.hpp"
#include "spectral.hpp"

namespace eptk {

/// Similarity gauge for resolvent norms: identity (naive Euclidean norm) or a
/// Dyson factor Omega of a metric Theta = Omega^dag Omega.
class Gauge {
public:
    static Gauge identity() { return Gauge{}; }

    static Gauge from_omega(const ComplexMatrix& omega) {
        require_square(omega, "gauge");
        const RealVector s = singular_values(omega);
        if (!(s(s.size() - 1) > 1e-14 * s(0))) throw ArgumentError("gauge: omega is singular");
        Gauge g;
        g.omega_ = omega;
        g.omega_inv_ = omega.fullPivLu().inverse();
        return g;
    }

    /// Positive square root of a positive-definite metric.
    static Gauge physical(const ComplexMatrix& h, const MetricCandidate& metric) {
        return from_omega(dyson_map(h, metric).omega);
    }

    bool is_identity() const noexcept { return omega_.size() == 0; }
    const ComplexMatrix& omega() const noexcept { return omega_; }

    ComplexMatrix conjugate(const ComplexMatrix& a) const {
        if (is_identity()) return a;
        if (a.rows() != omega_.rows()) throw ArgumentError("gauge: dimension mismatch");
        return omega_ * a * omega_inv_;
    }

    double cond() const { return is_identity() ? 1.0 : condition_number(omega_); }

private:
    ComplexMatrix omega_;
    ComplexMatrix omega_inv_;
};

inline constexpr double kEigenSnap = 1e-12;

namespace detail {

inline double gauge_value(const ComplexMatrix& h, const std::vector<Complex>& spectrum, Complex z, const Gauge& g) {
    for (const auto& e : spectrum)
        if (std::abs(z - e) <= kEigenSnap) return 0.0;
    const auto n = h.rows();
    return sigma_min(g.conjugate(z * ComplexMatrix::Identity(n, n) - h));
}

} // namespace detail

/// sigma_min(Omega (z - H) Omega^-1) = 1 / |(z - H)^-1| in the gauge's norm;
/// exactly 0 within 1e-12 of an eigenvalue.
inline double weighted_resolvent_gauge(const ComplexMatrix& h, Complex z, const Gauge& gauge = Gauge::identity()) {
    require_square(h, "weighted_resolvent_gauge");
    return detail::gauge_value(h, eigenvalues(h), z, gauge);
}

struct ZBox {
    double re_min = -1.0, re_max = 1.0, im_min = -1.0, im_max = 1.0;
};

struct PseudospectrumMap {
    ZBox zbox;
    int nx = 0, ny = 0;
    /// Row-major in the imaginary direction: values[iy * nx + ix].
    std::vector<double> values;
    bool weighted = false;

    Complex z(int ix, int iy) const {
        const double re = zbox.re_min + (zbox.re_max - zbox.re_min) * ix / (nx - 1);
        const double im = zbox.im_min + (zbox.im_max - zbox.im_min) * iy / (ny - 1);
        return {re, im};
    }
    double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix)]; }
    double spacing_re() const { return (zbox.re_max - zbox.re_min) / (nx - 1); }
    double spacing_im() const { return (zbox.im_max - zbox.im_min) / (ny - 1); }
};

inline constexpr std::size_t kMaxPseudoPoints = 1'000'000;

inline PseudospectrumMap pseudospectrum_grid(const ComplexMatrix& h, const Gauge& gauge, const ZBox& box, int nx,
                                             int ny) {
    require_square(h, "pseudospectrum_grid");
    if (nx < 2 || ny < 2) throw ArgumentError("pseudospectrum_grid: resolution must be >= 2 per axis");
    if (static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) > kMaxPseudoPoints)
        throw ArgumentError("pseudospectrum_grid: point budget of 1e6 exceeded");
    if (!(box.re_min < box.re_max && box.im_min < box.im_max)) throw ArgumentError("pseudospectrum_grid: empty box");

    PseudospectrumMap map;
    map.zbox = box;
    map.nx = nx;
    map.ny = ny;
    map.weighted = !gauge.is_identity();
    map.values.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    const auto spectrum = eigenvalues(h);
    parallel_for(map.values.size(), [&](std::size_t i) {
        const int ix = static_cast<int>(i % static_cast<std::size_t>(nx));
        const int iy = static_cast<int>(i / static_cast<std::size_t>(nx));
        map.values[i] = detail::gauge_value(h, spectrum, map.z(ix, iy), gauge);
    });
    return map;
}

/// Largest |Im z| over grid points with value < epsilon; 0 if none.
inline double stability_radius(const PseudospectrumMap& map, double epsilon) {
    if (!(epsilon > 0.0)) throw ArgumentError("stability_radius: epsilon must be > 0");
    double r = 0.0;
    for (int iy = 0; iy < map.ny; ++iy)
        for (int ix = 0; ix < map.nx; ++ix)
            if (map.at(ix, iy) < epsilon) r = std::max(r, std::abs(map.z(ix, iy).imag()));
    return r;
}

inline double stability_radius(const ComplexMatrix& h, const Gauge& gauge, double epsilon, const ZBox& box, int nx,
                               int ny) {
    if (!(epsilon > 0.0)) throw ArgumentError("stability_radius: epsilon must be > 0");
    return stability_radius(pseudospectrum_grid(h, gauge, box, nx, ny), epsilon);
}

/// Grid points whose value is strictly below all 8 neighbours.
inline std::vector<Complex> local_minima(const PseudospectrumMap& map) {
    std::vector<Complex> out;
    for (int iy = 1; iy + 1 < map.ny; ++iy)
        for (int ix = 1; ix + 1 < map.nx; ++ix) {
            const double v = map.at(ix, iy);
            bool lowest = true;
            for (int dy = -1; dy <= 1 && lowest; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if ((dx || dy) && !(v < map.at(ix + dx, iy + dy))) {
                        lowest = false;
                        break;
                    }
            if (lowest) out.push_back(map.z(ix, iy));
        }
    return out;
}

} // namespace eptk
