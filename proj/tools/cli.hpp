#pragma once

// Command-line front end. run() is the whole program minus process setup so
// the test suite can drive it with in-memory streams.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <eptk/eptk.hpp>
#include <eptk/io.hpp>

namespace eptk::cli {

enum ExitCode : int { kOk = 0, kArgError = 2, kDomainFailure = 3 };

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v))
        throw ArgumentError("not a finite number: '" + s + "'");
    return v;
}

/// "name=value,name=value"
inline ParamVector parse_params(const std::string& s) {
    ParamVector p;
    for (const auto& item : split(s, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ArgumentError("expected name=value, got '" + item + "'");
        p.set(item.substr(0, eq), parse_double(item.substr(eq + 1)));
    }
    return p;
}

struct Range {
    double lo, hi;
    std::optional<int> count;
};

/// "min:max[:count]"
inline Range parse_range(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() < 2 || parts.size() > 3) throw ArgumentError("expected min:max[:count], got '" + s + "'");
    Range r{parse_double(parts[0]), parse_double(parts[1]), std::nullopt};
    if (parts.size() == 3) {
        const double c = parse_double(parts[2]);
        if (c != std::floor(c) || c < 1) throw ArgumentError("range count must be a positive integer");
        r.count = static_cast<int>(c);
    }
    if (!(r.lo < r.hi)) throw ArgumentError("range needs min < max: '" + s + "'");
    return r;
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split(s, ',')) out.push_back(parse_double(item));
    return out;
}

inline ComplexMatrix parse_direction(const std::string& s, const ModelId& model, const ParamVector& at, int dim) {
    ComplexMatrix w = ComplexMatrix::Zero(dim, dim);
    if (s == "identity") return ComplexMatrix::Identity(dim, dim);
    if (s == "corner") {
        w(dim - 1, 0) = 1.0;
        return w;
    }
    if (s.rfind("d:", 0) == 0) return parameter_derivative(model, at, s.substr(2));
    if (s.size() >= 3 && s[0] == 'e') {
        // e<row><col>, 1-based; "e1,2" style for dims >= 10
        std::string rest = s.substr(1);
        int i = 0, j = 0;
        const auto comma = rest.find(',');
        try {
            if (comma != std::string::npos) {
                i = std::stoi(rest.substr(0, comma));
                j = std::stoi(rest.substr(comma + 1));
            } else if (rest.size() == 2) {
                i = rest[0] - '0';
                j = rest[1] - '0';
            }
        } catch (const std::exception&) {
            i = j = 0;
        }
        if (i >= 1 && j >= 1 && i <= dim && j <= dim) {
            w(i - 1, j - 1) = 1.0;
            return w;
        }
    }
    throw ArgumentError("unknown direction '" + s + "' (use eIJ, corner, identity or d:<param>)");
}

/// Destination for data: a file when -o was given, otherwise stdout.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path), out_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw ArgumentError("cannot open output file '" + path + "'");
            out_ = file_.get();
        }
    }
    std::ostream& stream() { return *out_; }
    bool to_file() const { return file_ != nullptr; }

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

/// Translates a serialized job into an argument vector.
inline std::vector<std::string> job_to_args(const nlohmann::json& job) {
    using nlohmann::json;
    if (!job.contains("subcommand")) throw ArgumentError("job file needs a \"subcommand\"");
    std::vector<std::string> args{job.at("subcommand").get<std::string>()};
    auto scalar = [](const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        if (v.is_number()) return io::fmt(v.get<double>());
        if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
        throw ArgumentError("job values must be scalars, objects of scalars, or lists");
    };
    auto joined = [&](const json& obj) {
        std::string s;
        for (const auto& [k, v] : obj.items()) s += (s.empty() ? "" : ",") + k + "=" + scalar(v);
        return s;
    };
    for (const auto& [key, value] : job.items()) {
        if (key == "subcommand") continue;
        if (key == "params") {
            args.insert(args.end(), {"-p", joined(value)});
        } else if (key == "seed_params") {
            args.insert(args.end(), {"--seed", joined(value)});
        } else if (key == "ranges") {
            for (const auto& [axis, r] : value.items()) args.insert(args.end(), {"--range", axis + "=" + scalar(r)});
        } else if (key == "weights") {
            std::string s;
            for (const auto& w : value) s += (s.empty() ? "" : ",") + scalar(w);
            args.insert(args.end(), {"--weights", s});
        } else if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back("--" + key);
        } else {
            args.insert(args.end(), {"--" + key, scalar(value)});
        }
    }
    return args;
}

} // namespace detail

/// Options shared by every model-based subcommand.
struct ModelOptions {
    std::string model;
    int n = 0;
    std::string params;
    std::string out;
    std::string format = "json";
    double tol = kDefaultRealityTol;

    void attach(CLI::App* sub, bool with_format = true) {
        sub->add_option("--model,-m", model,
                        "model id: four-by-four | wdw | bose-hubbard | ep-chain | ho")
            ->required();
        sub->add_option("-n,--dim", n,
                        "size parameter: BH matrix dimension N (N-1 particles), ep-chain length, ho level pairs");
        sub->add_option("-p,--params", params,
                        "fixed parameters name=value,... (dimensionless model units): a,b | tau | gamma,c,v | L");
        sub->add_option("-o,--out", out, "output file (default: stdout)");
        if (with_format) sub->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--tol", tol, "relative reality tolerance (x |H|_F, dimensionless)")
            ->check(CLI::PositiveNumber);
    }

    ModelId model_id() const { return parse_model(model, n); }
    ParamVector param_vector() const { return complete_params(model_id(), detail::parse_params(params)); }
};

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

namespace detail {

inline int cmd_spectrum(const ModelOptions& mo, std::optional<double> radius, std::ostream& out) {
    const ModelId id = mo.model_id();
    const ComplexMatrix h = evaluate(id, mo.param_vector());
    Spectrum sp = eigendecompose(h);
    sp = cluster_eigenvalues(std::move(sp), radius.value_or(ep_cluster_radius(h, static_cast<int>(h.rows()))));
    const RealityClass rc = classify_reality(sp, mo.tol * std::max(frobenius(h), 1e-300));
    Sink sink(mo.out, out);
    if (mo.format == "csv") {
        io::write_spectrum_csv(sink.stream(), sp);
    } else {
        auto j = io::to_json(sp);
        j["class"] = io::to_json(rc);
        sink.stream() << j.dump(2) << '\n';
    }
    if (sink.to_file()) out << "spectrum: " << sp.dim() << " eigenvalues, class " << to_string(rc.tag) << '\n';
    return kOk;
}

inline int cmd_domain(const ModelOptions& mo, const std::vector<std::string>& ranges, const std::string& vertices_path,
                      int vertex_order, bool no_boundary, std::ostream& out) {
    const ModelId id = mo.model_id();
    ModelSlice slice{id, parse_params(mo.params), {}};
    std::vector<std::pair<double, double>> box;
    std::vector<int> res;
    for (const auto& r : ranges) {
        const auto eq = r.find('=');
        if (eq == std::string::npos || eq == 0) throw ArgumentError("--range expects name=min:max[:count]");
        const Range rg = parse_range(r.substr(eq + 1));
        slice.axes.push_back(r.substr(0, eq));
        box.emplace_back(rg.lo, rg.hi);
        res.push_back(rg.count.value_or(101));
    }
    // validates axis names against the model
    ParamVector probe = slice.fixed;
    for (std::size_t i = 0; i < slice.axes.size(); ++i) probe.set(slice.axes[i], box[i].first);
    complete_params(id, probe);

    SweepOptions opt;
    opt.tol_rel = mo.tol;
    opt.boundary = !no_boundary;
    opt.vertex_order = vertex_order;
    const DomainGrid grid = sweep_grid(slice, box, res, opt);

    Sink sink(mo.out, out);
    io::write_domain_csv(sink.stream(), grid);
    if (!vertices_path.empty()) {
        Sink vs(vertices_path, out);
        vs.stream() << io::vertices_json(grid.vertices).dump(2) << '\n';
    }
    if (sink.to_file()) {
        std::size_t inside = 0;
        for (const auto& c : grid.cells) inside += c.tag == RealityTag::RealNondegenerate;
        out << "domain: " << grid.size() << " cells, " << inside << " inside, " << grid.boundary_pts.size()
            << " boundary points, " << grid.vertices.size() << " vertices\n";
    }
    return kOk;
}

inline int cmd_metric(const ModelOptions& mo, const std::string& weights_str, std::ostream& out, std::ostream& err) {
    const ModelId id = mo.model_id();
    const ComplexMatrix h = evaluate(id, mo.param_vector());
    if (classify_matrix(h, mo.tol).tag == RealityTag::ComplexPresent) {
        err << "error: outside unitarity domain (complex spectrum)\n";
        return kDomainFailure;
    }
    std::vector<double> w = weights_str.empty() ? std::vector<double>(static_cast<std::size_t>(h.rows()), 1.0)
                                                : parse_list(weights_str);
    const MetricCandidate m = assemble_metric(h, w);
    const DysonMap d = dyson_map(h, m);
    nlohmann::json j = io::to_json(m);
    j["dyson"] = io::to_json(d);
    j["herm_residual"] = d.herm_residual;
    j["quasi_hermiticity_residual"] = observable_compatibility(h, m.theta);
    Sink sink(mo.out, out);
    sink.stream() << j.dump(2) << '\n';
    if (sink.to_file())
        out << "metric: min_eig " << io::fmt(m.min_eig) << ", herm_residual " << io::fmt(d.herm_residual) << '\n';
    return kOk;
}

inline int cmd_ep(const ModelOptions& mo, const std::string& seed, int order, std::ostream& out) {
    const ModelId id = mo.model_id();
    const ParamVector seed_params = parse_params(seed);
    if (seed_params.items().empty()) throw ArgumentError("--seed needs at least one free parameter");
    ModelSlice slice{id, parse_params(mo.params), {}};
    for (const auto& [k, v] : seed_params.items()) slice.axes.push_back(k);
    const auto [vertex, est] = refine_ep_vertex(slice, seed_params, order);
    nlohmann::json j = io::to_json(est);
    j["params"] = io::params_json(vertex);
    Sink sink(mo.out, out);
    sink.stream() << j.dump(2) << '\n';
    if (sink.to_file()) out << "ep: order (" << est.algebraic_mult << "," << est.geometric_mult << ")\n";
    return kOk;
}

inline int cmd_perturb(const ModelOptions& mo, const std::string& direction, const std::string& lam, double probe_tol,
                       std::ostream& out) {
    const ModelId id = mo.model_id();
    const ParamVector at = mo.param_vector();
    const ComplexMatrix h = evaluate(id, at);
    const ComplexMatrix w = parse_direction(direction, id, at, static_cast<int>(h.rows()));
    const Range r = parse_range(lam);
    const PerturbationProbe p = splitting_exponent(h, w, r.lo, r.hi, r.count.value_or(13), mo.tol);
    const Admissibility adm = admissibility_probe(h, w, r.hi, probe_tol);
    nlohmann::json j = io::to_json(p);
    j["admissibility"] = std::string(to_string(adm));
    Sink sink(mo.out, out);
    if (sink.to_file()) sink.stream() << j.dump(2) << '\n';
    out << "exponent " << io::fmt(p.exponent_fit) << " r2 " << io::fmt(p.fit_r2) << " plus_real "
        << (p.side_plus_real ? "true" : "false") << " minus_real " << (p.side_minus_real ? "true" : "false") << '\n';
    return kOk;
}

struct PseudoArgs {
    std::string gauge = "naive";
    std::string weights;
    std::string zbox = "-1:1:-1:1";
    std::string res = "101x101";
    std::optional<double> eps;
    bool gnuplot = false;
};

inline int cmd_pseudospec(const ModelOptions& mo, const PseudoArgs& pa, std::ostream& out, std::ostream& err) {
    const ModelId id = mo.model_id();
    const ComplexMatrix h = evaluate(id, mo.param_vector());
    Gauge gauge = Gauge::identity();
    if (pa.gauge == "physical") {
        if (classify_matrix(h, mo.tol).tag == RealityTag::ComplexPresent) {
            err << "error: outside unitarity domain (no physical metric)\n";
            return kDomainFailure;
        }
        std::vector<double> w = pa.weights.empty() ? std::vector<double>(static_cast<std::size_t>(h.rows()), 1.0)
                                                   : parse_list(pa.weights);
        gauge = Gauge::physical(h, assemble_metric(h, w));
    }
    const auto zb = split(pa.zbox, ':');
    if (zb.size() != 4) throw ArgumentError("--zbox expects re_min:re_max:im_min:im_max");
    const ZBox box{parse_double(zb[0]), parse_double(zb[1]), parse_double(zb[2]), parse_double(zb[3])};
    const auto x = pa.res.find_first_of("x,");
    if (x == std::string::npos) throw ArgumentError("--res expects NXxNY");
    const double nx = parse_double(pa.res.substr(0, x)), ny = parse_double(pa.res.substr(x + 1));
    if (nx != std::floor(nx) || ny != std::floor(ny)) throw ArgumentError("--res expects integers");

    const PseudospectrumMap map = pseudospectrum_grid(h, gauge, box, static_cast<int>(nx), static_cast<int>(ny));
    Sink sink(mo.out, out);
    if (pa.gnuplot)
        io::write_pseudospec_gnuplot(sink.stream(), map);
    else
        io::write_pseudospec_csv(sink.stream(), map);
    if (pa.eps) {
        std::ostream& summary = sink.to_file() ? out : err;
        summary << "stability_radius " << io::fmt(stability_radius(map, *pa.eps)) << " eps " << io::fmt(*pa.eps)
                << " gauge " << pa.gauge << '\n';
    }
    return kOk;
}

/// Randomized closed-form vs numerical check of the 4x4 model spectrum.
inline int cmd_check(int count, std::uint64_t seed, std::ostream& out) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const double a = u(rng), b = u(rng);
        const auto closed = four_by_four_eigs_closed(a, b);
        worst = std::max(worst, multiset_distance({closed.begin(), closed.end()}, eigenvalues(eval_four_by_four(a, b))));
    }
    out << "four-by-four closed-form check: " << count << " points, seed " << seed << ", max distance "
        << io::fmt(worst) << (worst <= 1e-8 ? " PASS" : " FAIL") << '\n';
    return worst <= 1e-8 ? kOk : kDomainFailure;
}

} // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"eptk: spectral reality, metrics, exceptional points and pseudospectra of quasi-Hermitian matrices"};
    app.set_help_all_flag("--help-all", "show help for all subcommands");
    app.require_subcommand(0, 1);
    std::string job_path;
    app.add_option("--job", job_path, "run a serialized job (JSON object with \"subcommand\" and flag values)");

    ModelOptions mo;

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, condition numbers and clusters of a model matrix");
    mo.attach(spectrum);
    std::optional<double> radius;
    spectrum->add_option("--radius", radius, "cluster radius (energy units; default 10 eps^(1/dim) |H|_F)");

    auto* domain = app.add_subcommand("domain", "classify a parameter grid (CSV: axes,class,max_imag,min_gap)");
    mo.attach(domain, false);
    std::vector<std::string> ranges;
    std::string vertices_path;
    int vertex_order = 0;
    bool no_boundary = false;
    domain->add_option("--range,-r", ranges, "free axis name=min:max[:count] (repeat per axis; count default 101)")
        ->required();
    domain->add_option("--vertices", vertices_path, "write refined EP vertices (JSON list) to this file");
    domain->add_option("--vertex-order", vertex_order, "EP order to refine along the boundary (0 = off)");
    domain->add_flag("--no-boundary", no_boundary, "skip boundary bisection");

    auto* metric = app.add_subcommand("metric", "assemble a metric and its Dyson map (JSON)");
    mo.attach(metric, false);
    std::string weights;
    metric->add_option("--weights,-w", weights, "positive weights, one per eigenvalue (default all 1)");

    auto* ep = app.add_subcommand("ep", "refine an exceptional-point vertex (JSON)");
    mo.attach(ep, false);
    std::string seed_params;
    int order = 2;
    ep->add_option("--seed", seed_params, "free parameters and their start values name=value,...")->required();
    ep->add_option("--order", order, "EP order to search for (eigenvalue count)")->required();

    auto* perturb = app.add_subcommand("perturb", "splitting exponent of H_EP + lambda W (JSON to -o; summary on stdout)");
    mo.attach(perturb, false);
    std::string direction = "corner";
    std::string lam = "1e-6:1e-3";
    double probe_tol = 1e-6;
    perturb->add_option("--direction", direction, "W: eIJ (1-based unit entry), corner, identity, d:<param>");
    perturb->add_option("--lam", lam, "lambda range min:max[:count] (dimensionless, log-uniform, count default 13)");
    perturb->add_option("--probe-tol", probe_tol, "absolute imaginary-part tolerance for the admissibility probe");

    auto* pseudo = app.add_subcommand("pseudospec", "resolvent-norm map (CSV re,im,value)");
    mo.attach(pseudo, false);
    detail::PseudoArgs pa;
    double eps_value = 0.0;
    pseudo->add_option("--gauge", pa.gauge, "naive (Theta = I) | physical (metric from --weights)")
        ->check(CLI::IsMember({"naive", "physical"}));
    pseudo->add_option("--weights,-w", pa.weights, "metric weights for the physical gauge (default all 1)");
    pseudo->add_option("--zbox", pa.zbox, "re_min:re_max:im_min:im_max (energy units)");
    pseudo->add_option("--res", pa.res, "grid points NXxNY");
    auto* eps_opt = pseudo->add_option("--eps", eps_value, "report the stability radius at this epsilon (energy units)");
    pseudo->add_flag("--gnuplot", pa.gnuplot, "write gnuplot pm3d blocks instead of CSV");

    auto* check = app.add_subcommand("check", "randomized closed-form vs numerical spectrum check (4x4 model)");
    int count = 200;
    std::uint64_t rng_seed = 1;
    check->add_option("--count", count, "number of random (a,b) points in [-3,3]^2")->check(CLI::PositiveNumber);
    check->add_option("--seed", rng_seed, "RNG seed");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kArgError;
    }

    try {
        if (!job_path.empty()) {
            std::ifstream in(job_path);
            if (!in) throw ArgumentError("cannot read job file '" + job_path + "'");
            nlohmann::json job;
            try {
                job = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw ArgumentError(std::string("job file is not valid JSON: ") + e.what());
            }
            return run(detail::job_to_args(job), out, err);
        }
        if (*spectrum) return detail::cmd_spectrum(mo, radius, out);
        if (*domain) return detail::cmd_domain(mo, ranges, vertices_path, vertex_order, no_boundary, out);
        if (*metric) return detail::cmd_metric(mo, weights, out, err);
        if (*ep) return detail::cmd_ep(mo, seed_params, order, out);
        if (*perturb) return detail::cmd_perturb(mo, direction, lam, probe_tol, out);
        if (*pseudo) {
            if (eps_opt->count() > 0) {
                if (!(eps_value > 0.0)) throw ArgumentError("--eps must be > 0");
                pa.eps = eps_value;
            }
            return detail::cmd_pseudospec(mo, pa, out, err);
        }
        if (*check) return detail::cmd_check(count, rng_seed, out);
        err << app.help();
        return kArgError;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return kArgError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kDomainFailure;
    }
}

} // namespace eptk::cli
