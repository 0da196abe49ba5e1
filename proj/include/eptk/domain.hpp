#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "models.hpp"
#include "parallel.hpp"
#include "spectral.hpp"

namespace eptk {

/// A model with some parameters held fixed and the rest exposed as free
/// coordinates (the axes of a sweep or a vertex search).
struct ModelSlice {
    ModelId model;
    ParamVector fixed;
    std::vector<std::string> axes;

    ParamVector params(std::span<const double> coords) const {
        if (coords.size() != axes.size()) throw ArgumentError("slice: coordinate count mismatch");
        ParamVector p = fixed;
        for (std::size_t i = 0; i < axes.size(); ++i) p.set(axes[i], coords[i]);
        return complete_params(model, p);
    }

    std::vector<double> coords(const ParamVector& p) const {
        std::vector<double> out;
        out.reserve(axes.size());
        for (const auto& a : axes) out.push_back(p.has(a) ? p.get(a) : complete_params(model, fixed).get(a));
        return out;
    }

    ComplexMatrix matrix(std::span<const double> coords) const { return evaluate(model, params(coords)); }
};

/// Reality class of a matrix at relative tolerance tol_rel * |H|_F.
///
/// A complex pair is tolerated when it belongs to an eigenvalue cluster that
/// straddles the real axis with a spread at the rounding floor of its size;
/// such points sit on the domain boundary and are reported RealDegenerate.
inline RealityClass classify_matrix(const ComplexMatrix& h, double tol_rel = kDefaultRealityTol) {
    if (!(tol_rel > 0.0)) throw ArgumentError("tolerance must be > 0");
    const double scale = frobenius(h);
    const double tol = scale > 0.0 ? tol_rel * scale : tol_rel;
    Spectrum sp;
    sp.eigenvalues = eigenvalues(h);
    RealityClass rc = classify_reality(sp.eigenvalues, tol);
    if (rc.tag != RealityTag::ComplexPresent) return rc;

    const auto n = static_cast<int>(h.rows());
    sp = cluster_eigenvalues(std::move(sp), ep_cluster_radius(h, n));
    for (const auto& cluster : sp.clusters) {
        bool off_axis = false;
        Complex mean = 0.0;
        for (int i : cluster) {
            const Complex e = sp.eigenvalues[static_cast<std::size_t>(i)];
            off_axis = off_axis || std::abs(e.imag()) > tol;
            mean += e;
        }
        if (!off_axis) continue;
        const auto k = static_cast<int>(cluster.size());
        if (k < 2) return rc;
        mean /= static_cast<double>(k);
        if (std::abs(mean.imag()) > tol) return rc;
        double spread = 0.0;
        for (int i : cluster) spread = std::max(spread, std::abs(sp.eigenvalues[static_cast<std::size_t>(i)] - mean));
        if (spread > ep_cluster_radius(h, k)) return rc;
    }
    rc.tag = RealityTag::RealDegenerate;
    rc.min_gap = 0.0;
    return rc;
}

inline RealityClass classify_point(const ModelId& model, const ParamVector& params,
                                   double tol_rel = kDefaultRealityTol) {
    return classify_matrix(evaluate(model, params), tol_rel);
}

/// All four closed-form energies of the 4x4 model are real, nonzero and
/// distinct.
inline bool four_by_four_membership_closed(double a, double b) {
    const double a2 = a * a, b2 = b * b;
    const double r = 64.0 - 64.0 * b2 + 16.0 * a2 + 4.0 * b2 * a2 + a2 * a2;
    const double x = 20.0 - 4.0 * b2 - 2.0 * a2;
    return r > 0.0 && x > 2.0 * std::sqrt(r);
}

struct DomainGrid {
    ModelSlice slice;
    std::vector<std::pair<double, double>> box;
    std::vector<int> resolution;
    std::vector<RealityClass> cells;
    std::vector<ParamVector> boundary_pts;
    std::vector<std::pair<ParamVector, EPOrderEstimate>> vertices;

    std::size_t size() const noexcept { return cells.size(); }

    /// Multi-index of a cell; first axis varies slowest.
    std::vector<int> index_of(std::size_t cell) const {
        std::vector<int> idx(resolution.size());
        for (std::size_t d = resolution.size(); d-- > 0;) {
            idx[d] = static_cast<int>(cell % static_cast<std::size_t>(resolution[d]));
            cell /= static_cast<std::size_t>(resolution[d]);
        }
        return idx;
    }

    std::vector<double> coords_of(std::size_t cell) const {
        const auto idx = index_of(cell);
        std::vector<double> x(idx.size());
        for (std::size_t d = 0; d < idx.size(); ++d) {
            const auto [lo, hi] = box[d];
            x[d] = lo + (hi - lo) * static_cast<double>(idx[d]) / static_cast<double>(resolution[d] - 1);
        }
        return x;
    }

    double spacing(std::size_t axis) const {
        return (box[axis].second - box[axis].first) / static_cast<double>(resolution[axis] - 1);
    }
};

struct SweepOptions {
    double tol_rel = kDefaultRealityTol;
    bool boundary = true;
    double boundary_tol = 1e-6;
    /// Eigenvalue-cluster order to look for along the boundary; 0 disables
    /// vertex search.
    int vertex_order = 0;
    std::size_t max_vertices = 8;
};

inline constexpr std::size_t kMaxGridCells = 10'000'000;
inline constexpr int kMaxBisectionSteps = 60;

/// Bisects the segment inside -> outside down to length tol_param and returns
/// its midpoint. inside must be RealNondegenerate, outside ComplexPresent.
inline ParamVector bisect_boundary(const ModelSlice& slice, const ParamVector& inside, const ParamVector& outside,
                                   double tol_param, double tol_rel = kDefaultRealityTol) {
    if (!(tol_param > 0.0)) throw ArgumentError("bisect_boundary: tol_param must be > 0");
    auto in = slice.coords(inside);
    auto out = slice.coords(outside);
    if (classify_matrix(slice.matrix(in), tol_rel).tag != RealityTag::RealNondegenerate)
        throw ArgumentError("bisect_boundary: inside point is not real-nondegenerate");
    if (classify_matrix(slice.matrix(out), tol_rel).tag != RealityTag::ComplexPresent)
        throw ArgumentError("bisect_boundary: outside point has no complex eigenvalue");

    auto length = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < in.size(); ++i) s += (in[i] - out[i]) * (in[i] - out[i]);
        return std::sqrt(s);
    };
    std::vector<double> mid(in.size());
    for (int step = 0; step < kMaxBisectionSteps && length() > tol_param; ++step) {
        for (std::size_t i = 0; i < in.size(); ++i) mid[i] = 0.5 * (in[i] + out[i]);
        if (classify_matrix(slice.matrix(mid), tol_rel).tag == RealityTag::RealNondegenerate)
            in = mid;
        else
            out = mid;
    }
    for (std::size_t i = 0; i < in.size(); ++i) mid[i] = 0.5 * (in[i] + out[i]);
    return slice.params(mid);
}

/// Diameter of the tightest group of `order` eigenvalues: for each eigenvalue,
/// take its `order` nearest neighbours, recentre on their mean, re-select the
/// `order` nearest to that mean, and keep the smallest diameter found.
/// Also reports the mean of the winning group.
inline std::pair<double, Complex> cluster_spread(const std::vector<Complex>& values, int order) {
    const auto n = values.size();
    if (order < 1 || static_cast<std::size_t>(order) > n) throw ArgumentError("cluster order out of range");
    const auto k = static_cast<std::size_t>(order);
    auto nearest = [&](Complex c) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                          [&](std::size_t x, std::size_t y) { return std::abs(values[x] - c) < std::abs(values[y] - c); });
        idx.resize(k);
        return idx;
    };
    double best = std::numeric_limits<double>::infinity();
    Complex best_mean = 0.0;
    for (std::size_t anchor = 0; anchor < n; ++anchor) {
        auto group = nearest(values[anchor]);
        Complex mean = 0.0;
        for (auto i : group) mean += values[i];
        mean /= static_cast<double>(k);
        group = nearest(mean);
        mean = 0.0;
        for (auto i : group) mean += values[i];
        mean /= static_cast<double>(k);
        double diam = 0.0;
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b) diam = std::max(diam, std::abs(values[group[a]] - values[group[b]]));
        if (diam < best) {
            best = diam;
            best_mean = mean;
        }
    }
    return {best, best_mean};
}

namespace detail {

/// Derivative-free simplex descent. Returns the best vertex.
inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x0, double step, double x_tol, int max_evals) {
    const std::size_t d = x0.size();
    std::vector<std::vector<double>> simplex(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i) simplex[i + 1][i] += step;
    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fv[i] = f(simplex[i]);
    int evals = static_cast<int>(d + 1);

    std::vector<std::size_t> order(d + 1);
    auto combine = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
        std::vector<double> r(d);
        for (std::size_t i = 0; i < d; ++i) r[i] = a[i] + t * (b[i] - a[i]);
        return r;
    };
    while (evals < max_evals) {
        for (std::size_t i = 0; i <= d; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];

        double diam = 0.0;
        for (std::size_t i = 0; i <= d; ++i)
            for (std::size_t j = 0; j < d; ++j) diam = std::max(diam, std::abs(simplex[i][j] - simplex[best][j]));
        if (diam < x_tol) break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i)
            if (i != worst)
                for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j] / static_cast<double>(d);

        const auto reflected = combine(centroid, simplex[worst], -1.0);
        const double fr = f(reflected);
        ++evals;
        if (fr < fv[best]) {
            const auto expanded = combine(centroid, simplex[worst], -2.0);
            const double fe = f(expanded);
            ++evals;
            if (fe < fr) {
                simplex[worst] = expanded;
                fv[worst] = fe;
            } else {
                simplex[worst] = reflected;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = reflected;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        const auto contracted = combine(centroid, outside ? reflected : simplex[worst], 0.5);
        const double fc = f(contracted);
        ++evals;
        if (fc < (outside ? fr : fv[worst])) {
            simplex[worst] = contracted;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == best) continue;
            simplex[i] = combine(simplex[best], simplex[i], 0.5);
            fv[i] = f(simplex[i]);
            ++evals;
        }
    }
    const auto it = std::min_element(fv.begin(), fv.end());
    return simplex[static_cast<std::size_t>(it - fv.begin())];
}

} // namespace detail

struct VertexOptions {
    double initial_step = 0.1;
    double x_tol = 1e-10;
    int max_evals = 4000;
    int restarts = 6;
    double tol_rank = 1e-6;
};

/// Locates an exceptional point of the requested order near seed by
/// minimizing the spread of the tightest `target_order`-eigenvalue group over
/// the slice's free coordinates.
///
/// The attainable spread is bounded below by the rounding floor
/// 10 eps^(1/order) |H|_F; a minimum above that floor is reported as
/// "vertex not found".
inline std::pair<ParamVector, EPOrderEstimate> refine_ep_vertex(const ModelSlice& slice, const ParamVector& seed,
                                                                int target_order,
                                                                const VertexOptions& opt = {}) {
    if (slice.axes.empty()) throw ArgumentError("refine_ep_vertex: slice has no free parameters");
    const ComplexMatrix h0 = slice.matrix(slice.coords(seed));
    if (target_order < 2 || target_order > h0.rows())
        throw ArgumentError("refine_ep_vertex: target order must lie in [2, dim]");

    auto objective = [&](const std::vector<double>& x) {
        try {
            return cluster_spread(eigenvalues(slice.matrix(x)), target_order).first;
        } catch (const ArgumentError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<double> x = slice.coords(seed);
    double fx = objective(x);
    double step = opt.initial_step;
    for (int round = 0; round <= opt.restarts; ++round) {
        const auto candidate = detail::nelder_mead(objective, x, step, opt.x_tol, opt.max_evals);
        const double fc = objective(candidate);
        if (fc < fx) {
            x = candidate;
            fx = fc;
        }
        step *= 0.1;
    }

    const ComplexMatrix h = slice.matrix(x);
    const double floor = ep_cluster_radius(h, target_order);
    const auto [spread, center] = cluster_spread(eigenvalues(h), target_order);
    if (!(spread <= floor))
        throw DomainError("vertex not found: cluster spread " + std::to_string(spread) + " above floor " +
                          std::to_string(floor));
    const EPOrderEstimate est = ep_order_estimate(h, center, opt.tol_rank, floor);
    return {slice.params(x), est};
}

/// Classifies every grid node (in parallel, index-ordered), bisects edges
/// that cross from RealNondegenerate to ComplexPresent, and optionally
/// refines EP vertices seeded from the boundary points with the tightest
/// eigenvalue clusters.
inline DomainGrid sweep_grid(const ModelSlice& slice, std::vector<std::pair<double, double>> box,
                             std::vector<int> resolution, const SweepOptions& opt = {}) {
    if (slice.axes.empty() || box.size() != slice.axes.size() || resolution.size() != slice.axes.size())
        throw ArgumentError("sweep_grid: need one (min,max) interval and one resolution per axis");
    std::size_t total = 1;
    for (std::size_t d = 0; d < resolution.size(); ++d) {
        if (resolution[d] < 2) throw ArgumentError("sweep_grid: resolution must be >= 2 per axis");
        if (!(box[d].first < box[d].second)) throw ArgumentError("sweep_grid: empty interval");
        total *= static_cast<std::size_t>(resolution[d]);
        if (total > kMaxGridCells) throw ArgumentError("sweep_grid: cell budget of 1e7 exceeded");
    }

    DomainGrid grid;
    grid.slice = slice;
    grid.box = std::move(box);
    grid.resolution = std::move(resolution);
    grid.cells.resize(total);
    parallel_for(total, [&](std::size_t i) {
        grid.cells[i] = classify_matrix(slice.matrix(grid.coords_of(i)), opt.tol_rel);
    });

    if (!opt.boundary) return grid;

    // Edges (cell, neighbour along axis d) with an inside/outside pair.
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<std::size_t> stride(grid.resolution.size(), 1);
    for (std::size_t d = grid.resolution.size() - 1; d-- > 0;)
        stride[d] = stride[d + 1] * static_cast<std::size_t>(grid.resolution[d + 1]);
    for (std::size_t i = 0; i < total; ++i) {
        const auto idx = grid.index_of(i);
        for (std::size_t d = 0; d < idx.size(); ++d) {
            if (idx[d] + 1 >= grid.resolution[d]) continue;
            const std::size_t j = i + stride[d];
            const auto a = grid.cells[i].tag, b = grid.cells[j].tag;
            if (a == RealityTag::RealNondegenerate && b == RealityTag::ComplexPresent)
                edges.emplace_back(i, j);
            else if (b == RealityTag::RealNondegenerate && a == RealityTag::ComplexPresent)
                edges.emplace_back(j, i);
        }
    }
    grid.boundary_pts.resize(edges.size());
    parallel_for(edges.size(), [&](std::size_t e) {
        grid.boundary_pts[e] = bisect_boundary(slice, slice.params(grid.coords_of(edges[e].first)),
                                               slice.params(grid.coords_of(edges[e].second)), opt.boundary_tol,
                                               opt.tol_rel);
    });

    if (opt.vertex_order < 2 || grid.boundary_pts.empty()) return grid;

    std::vector<std::pair<double, std::size_t>> ranked(grid.boundary_pts.size());
    parallel_for(ranked.size(), [&](std::size_t e) {
        const auto vals = eigenvalues(evaluate(slice.model, grid.boundary_pts[e]));
        ranked[e] = {cluster_spread(vals, opt.vertex_order).first, e};
    });
    std::sort(ranked.begin(), ranked.end());

    double min_sep = 0.0;
    for (std::size_t d = 0; d < grid.resolution.size(); ++d) min_sep = std::max(min_sep, 4.0 * grid.spacing(d));
    auto distance = [&](const ParamVector& p, const ParamVector& q) {
        const auto x = slice.coords(p), y = slice.coords(q);
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
        return std::sqrt(s);
    };
    std::vector<ParamVector> seeds;
    for (const auto& [spread, e] : ranked) {
        if (seeds.size() >= opt.max_vertices) break;
        const auto& p = grid.boundary_pts[e];
        if (std::all_of(seeds.begin(), seeds.end(), [&](const ParamVector& s) { return distance(s, p) > min_sep; }))
            seeds.push_back(p);
    }

    std::vector<std::optional<std::pair<ParamVector, EPOrderEstimate>>> found(seeds.size());
    VertexOptions vopt;
    vopt.initial_step = min_sep;
    parallel_for(seeds.size(), [&](std::size_t s) {
        try {
            found[s] = refine_ep_vertex(slice, seeds[s], opt.vertex_order, vopt);
        } catch (const DomainError&) {
        }
    });
    for (auto& f : found) {
        if (!f) continue;
        const bool dup = std::any_of(grid.vertices.begin(), grid.vertices.end(),
                                     [&](const auto& v) { return distance(v.first, f->first) < 1e-6; });
        if (!dup) grid.vertices.push_back(std::move(*f));
    }
    return grid;
}

} // namespace eptk
