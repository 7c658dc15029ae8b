#include "heatmv/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>

#include "heatmv/field.hpp"
#include "heatmv/geometry.hpp"
#include "heatmv/growth.hpp"
#include "heatmv/kernels.hpp"
#include "heatmv/quadrature.hpp"
#include "heatmv/solvers.hpp"
#include "heatmv/verify.hpp"

namespace heatmv::cli {

namespace {

void maybe_plot(const Outputs& out, const std::string& x, const std::string& y, bool log_x = false,
                bool log_y = false) {
    if (out.plot_script.empty()) return;
    if (out.csv.empty()) throw PreconditionError("--plot-script needs --csv");
    write_plot_script(out.plot_script, out.csv, x, y, log_x, log_y);
}

ScalarField field_or_constant(const std::string& id, std::size_t n) {
    if (id.rfind("const:", 0) == 0) {
        const double c = std::stod(id.substr(6));
        return make_field(id, n, Equation::none, [c](const SpaceTimePoint&) { return c; });
    }
    auto f = catalog(id);
    if (f.dim() != n) throw PreconditionError("field '" + id + "' has dimension " + std::to_string(f.dim()));
    return f;
}

json solve_config(const SolveOptions& o) {
    return {{"equation", o.equation}, {"n", o.n},         {"half_width", o.half_width}, {"t_lo", o.t_lo},
            {"t_hi", o.t_hi},         {"h", o.h},         {"dt", o.dt},                 {"theta", o.theta},
            {"initial", o.initial},   {"boundary", o.boundary.empty() ? o.initial : o.boundary},
            {"exact", o.exact},       {"max_error", o.max_error}};
}

GridSolution solve_from(const SolveOptions& o) {
    const Equation eq = equation_from_string(o.equation);
    const DomainBox box = DomainBox::cube(o.n, o.half_width, o.t_lo, o.t_hi);
    const auto init = field_or_constant(o.initial, o.n);
    const auto bnd = field_or_constant(o.boundary.empty() ? o.initial : o.boundary, o.n);
    return solve_fd(eq, box, init, bnd, Scheme{o.theta, o.h, o.dt});
}

json grid_header(const GridSolution& g) {
    json h = {{"dims", g.dim()},
              {"nodes", g.nodes},
              {"h", g.h},
              {"steps", g.steps},
              {"dt", g.dt},
              {"equation", to_string(g.equation)},
              {"scheme", {{"theta", g.scheme.theta}, {"h", g.scheme.h}, {"dt", g.scheme.dt}}},
              {"box", to_json(g.box)},
              {"initial", g.initial_id},
              {"boundary", g.boundary_id},
              {"truncation_estimate", g.truncation_estimate},
              {"linear_iterations", g.linear_iterations}};
    if (g.mass)
        h["mass_balance"] = {{"mass_change", g.mass->mass_change},
                             {"boundary_flux", g.mass->boundary_flux},
                             {"imbalance", g.mass->imbalance}};
    std::vector<std::string> cols{"t"};
    for (std::size_t i = 0; i < g.dim(); ++i) cols.push_back("x" + std::to_string(i + 1));
    cols.push_back("u");
    h["csv_columns"] = cols;
    return h;
}

std::string normalize_verdict(const std::string& s) {
    if (s == "diverging" || s == "diverging-trend") return "diverging-trend";
    if (s == "converging" || s == "converging-trend") return "converging-trend";
    if (s == "inconclusive") return s;
    throw PreconditionError("unknown verdict '" + s + "'");
}

}  // namespace

void run_catalog(const CatalogOptions& o, const Outputs& out, Report& rep) {
    rep.config = {{"equation", o.equation}, {"n", o.n}};
    json list = json::array();
    std::vector<std::vector<double>> rows;
    for (const auto& e : catalog_listing()) {
        if (!o.equation.empty() && to_string(e.equation) != o.equation) continue;
        if (o.n != 0 && e.n != o.n) continue;
        json j = {{"id", e.id}, {"n", e.n}, {"equation", to_string(e.equation)}, {"solution", e.solution},
                  {"formula", e.formula}};
        if (!e.probe.radii.empty())
            j["probe"] = {{"center", to_json(e.probe.center)},
                          {"radii", e.probe.radii},
                          {"expected", to_string(e.probe.expected)}};
        list.push_back(j);
    }
    rep.result["entries"] = list;
    if (!out.csv.empty()) {
        // Text columns do not fit the numeric writer.
        std::ofstream f(out.csv);
        if (!f) throw PreconditionError("cannot open '" + out.csv + "'");
        f << "id,n,equation,solution\n";
        for (const auto& j : list)
            f << j["id"].get<std::string>() << "," << j["n"].get<std::size_t>() << ","
              << j["equation"].get<std::string>() << "," << (j["solution"].get<bool>() ? 1 : 0) << "\n";
    }
}

void run_mv(const MvOptions& o, const Outputs& out, Report& rep, bool classify_only) {
    const auto& entry = catalog_entry(o.field);
    const auto f = catalog(o.field);
    const Equation eq = o.equation.empty() ? entry.equation : equation_from_string(o.equation);
    if (eq == Equation::none) throw PreconditionError("field '" + o.field + "' needs --equation");

    const bool probe = o.center.empty();
    if (probe && entry.probe.radii.empty()) throw PreconditionError("field '" + o.field + "' has no probe; give --center");
    const SpaceTimePoint center = probe ? entry.probe.center : parse_point(o.center);
    std::vector<double> radii = o.radii;
    if (radii.empty()) radii = probe ? entry.probe.radii : std::vector<double>{0.2, 0.1, 0.05};

    MVConfig cfg;
    cfg.method = quad_method_from_string(o.method);
    cfg.tol = o.tol;
    cfg.seed = o.seed;
    const double tol = cfg.tolerance_for(f.dim());

    std::optional<PointClass> expected;
    if (!o.expect.empty())
        expected = point_class_from_string(o.expect);
    else if (probe)
        expected = entry.probe.expected;
    else if (entry.solution && entry.equation == eq)
        expected = PointClass::temperature;

    rep.config = {{"field", o.field},  {"center", to_json(center)}, {"radii", radii},
                  {"equation", to_string(eq)}, {"method", to_string(cfg.method)}, {"seed", o.seed},
                  {"expect", expected ? json(to_string(*expected)) : json(nullptr)}};
    rep.tolerances["residual"] = {tol, o.tol > 0 ? "user" : (f.dim() == 1 ? "default n=1" : "default n=2")};
    if (cfg.method != QuadMethod::tensor) rep.tolerances["mc_target_se"] = {cfg.mc_target_se, "default"};

    std::vector<double> residuals;
    json per = json::array();
    std::vector<std::vector<double>> rows;
    for (double r : radii) {
        const auto res = mv_residual(f, center, r, eq, cfg);
        residuals.push_back(res.residual);
        json j = {{"r", r}, {"residual", res.residual}, {"error_estimate", res.integral.error_estimate}};
        if (!classify_only)
            j.update({{"mean_value", res.integral.value},
                      {"method", to_string(res.integral.method)},
                      {"nodes_or_samples", res.integral.nodes_or_samples},
                      {"level", res.integral.level}});
        per.push_back(j);
        rows.push_back({r, res.residual, res.integral.error_estimate});
    }
    const PointClass label = classify_residuals(residuals, tol);
    rep.result["residuals"] = per;
    rep.result["classification"] = to_string(label);
    if (expected) {
        rep.result["expected"] = to_string(*expected);
        rep.pass = label == *expected;
        if (!rep.pass) rep.message = "classification " + to_string(label) + " != expected " + to_string(*expected);
    }
    if (!out.csv.empty()) write_csv(out.csv, {"r", "residual", "error_estimate"}, rows);
    maybe_plot(out, "r", "residual", true);
}

void run_solve(const SolveOptions& o, const Outputs& out, Report& rep) {
    rep.config = solve_config(o);
    const auto g = solve_from(o);
    rep.result["grid"] = grid_header(g);
    rep.tolerances["truncation_estimate"] = {g.truncation_estimate, "scheme"};
    if (!o.exact.empty()) {
        const double err = max_error(g, catalog(o.exact).relabeled(o.exact, g.equation));
        rep.result["max_error"] = err;
        if (o.max_error > 0) {
            rep.tolerances["max_error"] = {o.max_error, "user"};
            rep.pass = err <= o.max_error;
            if (!rep.pass) rep.message = "max error above --max-error";
        }
    }
    if (!out.csv.empty()) {
        std::vector<std::vector<double>> rows;
        rows.reserve((g.steps + 1) * g.nodes_per_slice());
        for (std::size_t k = 0; k <= g.steps; ++k)
            for (std::size_t f = 0; f < g.nodes_per_slice(); ++f) {
                std::vector<double> row{static_cast<double>(g.time_at(k))};
                for (double x : g.node_point(f)) row.push_back(x);
                row.push_back(g.at(k, f));
                rows.push_back(std::move(row));
            }
        write_csv(out.csv, grid_header(g)["csv_columns"].get<std::vector<std::string>>(), rows);
        const std::string header = o.header.empty() ? out.csv + ".json" : o.header;
        std::ofstream h(header);
        if (!h) throw PreconditionError("cannot open '" + header + "'");
        h << grid_header(g).dump(2) << "\n";
        rep.result["header"] = header;
    }
    maybe_plot(out, "x1", "u");
}

void run_geometry_export(const GeometryOptions& o, const Outputs& out, Report& rep) {
    const SpaceTimePoint c = parse_point(o.center);
    HeatBall ball;
    if (o.family == "omega")
        ball = HeatBall::omega(c, o.radius);
    else if (o.family == "omega_m")
        ball = HeatBall::omega_m(c, o.radius, o.m);
    else if (o.family == "xi")
        ball = HeatBall::xi(c, o.radius, o.m);
    else if (o.family == "gamma")
        ball = HeatBall::gamma(c, o.radius);
    else
        throw PreconditionError("unknown ball family '" + o.family + "'");
    rep.config = {{"family", o.family}, {"center", to_json(c)}, {"radius", o.radius}, {"m", o.m},
                  {"slices", o.slices}, {"angular", o.angular}};
    const auto samples = ball_boundary(ball, o.slices, o.angular);
    std::vector<std::vector<double>> rows;
    json pts = json::array();
    for (const auto& s : samples) {
        std::vector<double> row{static_cast<double>(s.t)};
        for (double x : s.x) row.push_back(x);
        pts.push_back(row);
        rows.push_back(std::move(row));
    }
    std::vector<std::string> cols{"t"};
    for (std::size_t i = 0; i < c.dim(); ++i) cols.push_back("x" + std::to_string(i + 1));
    rep.result["bounds"] = to_json(bounds(ball));
    rep.result["columns"] = cols;
    rep.result["boundary"] = pts;
    if (!out.csv.empty()) write_csv(out.csv, cols, rows);
    maybe_plot(out, "x1", "t");
}

void run_kernel_export(const KernelOptions& o, const Outputs& out, Report& rep) {
    const SpaceTimePoint c = parse_point(o.center);
    KernelSpec spec{kernel_family_from_string(o.family), c.dim(), o.m, o.radius, c};
    spec.validate();
    rep.config = {{"family", o.family}, {"center", to_json(c)}, {"radius", o.radius}, {"m", o.m},
                  {"ny", o.ny},         {"ns", o.ns}};
    const auto prof = kernel_profile(spec, o.ny, o.ns);
    std::vector<std::vector<double>> rows;
    double kmax = 0;
    for (const auto& s : prof) {
        rows.push_back({s.y, static_cast<double>(s.s), s.k});
        kmax = std::max(kmax, s.k);
    }
    rep.result["samples"] = prof.size();
    rep.result["max_kernel"] = kmax;
    if (!out.csv.empty()) write_csv(out.csv, {"y", "s", "K"}, rows);
    maybe_plot(out, "y", "K");
}

void run_maxprin(const MaxPrinOptions& o, const Outputs& out, Report& rep) {
    rep.config = solve_config(o.solve);
    rep.config["t0"] = o.t0 ? json(*o.t0) : json(nullptr);
    rep.config["corrupt"] = o.corrupt;
    auto g = solve_from(o.solve);

    GridSolution h = g;
    if (o.corrupt) {
        // Middle node of the middle layer, lifted above the global max.
        const std::size_t k = std::max<std::size_t>(1, h.steps / 2);
        std::size_t flat = 0, stride = 1;
        for (std::size_t a = 0; a < h.dim(); ++a) {
            flat += stride * (h.nodes[a] / 2);
            stride *= h.nodes[a];
        }
        const auto [lo, hi] = std::minmax_element(h.values.begin(), h.values.end());
        h.values[k * h.nodes_per_slice() + flat] = *hi + (*hi - *lo) + 1;
        rep.result["corrupted_node"] = to_json({h.node_point(flat), h.time_at(k)});
    }
    const auto weak = check_weak_max(h, o.t0);
    rep.tolerances["weak_max"] = {weak.tolerance, "10x truncation estimate"};
    rep.result["weak"] = {{"interior_max", weak.interior_max},
                          {"interior_location", to_json(weak.interior_location)},
                          {"parabolic_boundary_max", weak.parabolic_boundary_max},
                          {"violation", weak.violation},
                          {"not_applicable", weak.not_applicable},
                          {"t0", static_cast<double>(weak.t0)}};

    const auto strong = check_strong_max(h, o.strong_tol > 0 ? std::optional<double>(o.strong_tol) : std::nullopt);
    rep.tolerances["strong_max"] = {strong.tolerance, o.strong_tol > 0 ? "user" : "1e-9 x data scale"};
    json flagged = json::array();
    for (const auto& p : strong.flagged) flagged.push_back(to_json(p));
    rep.result["strong"] = {{"checked", strong.checked},
                            {"attaining", strong.attaining},
                            {"flagged", flagged},
                            {"violation", strong.violation()}};

    bool prop_ok = true;
    try {
        const auto prop = check_infinite_propagation(g);
        prop_ok = prop.degenerate || prop.positive();
        rep.result["propagation"] = {{"degenerate", prop.degenerate},
                                     {"t_probe", static_cast<double>(prop.t_probe)},
                                     {"interior_min", prop.interior_min},
                                     {"positive", prop.positive()}};
    } catch (const PreconditionError& e) {
        rep.result["propagation"] = {{"not_applicable", e.what()}};
    }
    rep.pass = !weak.violation && !strong.violation() && prop_ok;
    if (!rep.pass) rep.message = "maximum-principle check failed";

    if (!out.csv.empty()) {
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k <= g.steps; ++k) {
            double in = -HUGE_VAL, bd = -HUGE_VAL;
            for (std::size_t f = 0; f < g.nodes_per_slice(); ++f) {
                double& slot = (k == 0 || g.on_boundary(f)) ? bd : in;
                slot = std::max(slot, g.at(k, f));
            }
            rows.push_back({static_cast<double>(g.time_at(k)), k == 0 ? bd : in, bd});
        }
        write_csv(out.csv, {"t", "interior_max", "boundary_max"}, rows);
    }
    maybe_plot(out, "t", "interior_max");
}

void run_harnack_mintq(const HarnackMintqOptions& o, const Outputs& out, Report& rep) {
    const auto U = catalog(o.field);
    std::vector<double> c = o.center;
    if (c.empty()) {
        c.assign(U.dim(), 0.0);
        c.push_back(0.5);
    }
    const SpaceTimePoint P = parse_point(c);
    rep.config = {{"field", o.field}, {"center", to_json(P)}, {"radii", o.radii}, {"q", o.q},
                  {"samples", o.samples}, {"seed", o.seed}};
    json rows_j = json::array();
    std::vector<std::vector<double>> rows;
    for (double R : o.radii) {
        const auto h = harnack_mintq(U, P.x, P.t, R, o.q, o.samples, o.seed);
        rows_j.push_back({{"R", R}, {"lhs", h.lhs}, {"rhs", h.rhs}, {"ratio", h.ratio}, {"ratio_se", h.ratio_se},
                          {"unbounded", h.unbounded}});
        rows.push_back({R, h.lhs, h.rhs, h.ratio, h.ratio_se});
        if (h.unbounded) rep.pass = false;
    }
    rep.result["curve"] = rows_j;
    if (!rep.pass) rep.message = "unbounded ratio";
    if (!out.csv.empty()) write_csv(out.csv, {"R", "lhs", "rhs", "ratio", "ratio_se"}, rows);
    maybe_plot(out, "R", "ratio", true);
}

void run_harnack_family(const HarnackFamilyOptions& o, const Outputs& out, Report& rep) {
    if (o.x0.size() != o.n) throw PreconditionError("--x0 must have n coordinates");
    if (o.counts.size() < 2) throw PreconditionError("--counts needs at least two family sizes");
    const DomainBox box = DomainBox::cube(o.n, 3.0, -0.25, 0.5);
    const SpatialVector x0(std::span<const double>(o.x0.data(), o.x0.size()));
    const SpaceTimePoint P{x0, o.t0};
    std::vector<SpaceTimePoint> K;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 5; ++j) {
            SpatialVector x = x0;
            x[0] += -0.4 + 0.1 * i;
            const Time t = o.gap > 0 ? P.t - o.gap - 0.1L + 0.025L * j : P.t;
            K.push_back({x, t});
        }
    std::optional<RasterDomain> E;
    if (o.gap > 0) E.emplace(box, 32.0);
    rep.config = {{"n", o.n}, {"counts", o.counts}, {"x0", o.x0}, {"t0", o.t0}, {"gap", o.gap},
                  {"spacing", o.spacing}, {"box", to_json(box)}};
    rep.tolerances["kappa_stability"] = {0.1, "default"};
    json rows_j = json::array();
    std::vector<std::vector<double>> rows;
    std::vector<double> kap;
    for (std::size_t c : o.counts) {
        const auto fam = pullback_family(o.n, c, box, o.spacing);
        const auto k = empirical_kappa(fam, K, {P}, E ? &*E : nullptr);
        rows_j.push_back({{"count", c}, {"kappa_hat", k.kappa_hat}, {"argmax", k.argmax}});
        rows.push_back({static_cast<double>(c), k.kappa_hat});
        kap.push_back(k.kappa_hat);
    }
    const double change = std::fabs(kap.back() / kap[kap.size() - 2] - 1);
    rep.result["family"] = rows_j;
    rep.result["lambda_validated"] = o.gap > 0;
    rep.result["last_relative_change"] = change;
    rep.pass = std::isfinite(kap.back()) && change <= 0.1;
    if (!rep.pass) rep.message = "empirical kappa not stable under family growth";
    if (!out.csv.empty()) write_csv(out.csv, {"count", "kappa_hat"}, rows);
    maybe_plot(out, "count", "kappa_hat", true, true);
}

void run_growth(const GrowthOptions& o, const Outputs& out, Report& rep) {
    if (o.list) {
        rep.config = {{"list", true}};
        json list = json::array();
        for (const auto& e : growth_catalog())
            list.push_back({{"spec", e.spec},
                            {"default_r_max", e.default_r_max},
                            {"analytic", e.analytic ? json(to_string(*e.analytic)) : json(nullptr)},
                            {"note", e.note}});
        rep.result["catalog"] = list;
        return;
    }
    if (o.p.empty()) throw PreconditionError("growth needs --p or --list");
    rep.config = {{"p", o.p}, {"r_max", o.r_max}, {"per_octave", o.per_octave},
                  {"lambda", o.lambda ? json(*o.lambda) : json(nullptr)}, {"expect", o.expect}};
    rep.tolerances["minorant_equality"] = {kMinorantEqualityTol, "default"};
    const auto p = growth_from_spec(o.p, o.r_max);
    const auto d = divergence_diagnostic(p, std::nullopt, o.per_octave);
    auto describe = [](const DivergenceReport& r) {
        bool sandwich = true;
        for (const auto& s : r.sandwich) sandwich = sandwich && s.holds();
        return json{{"r_max", r.r_max},
                    {"integral_p", r.integral_p},
                    {"integral_pbar", r.integral_pbar},
                    {"ell_sum", r.ell_sum},
                    {"ell", r.ell},
                    {"tail_slope", r.tail_slope},
                    {"verdict", to_string(r.verdict)},
                    {"sandwich_holds", sandwich},
                    {"octave_increments", r.octave_increments}};
    };
    rep.result["gamma"] = p.gamma();
    rep.result["diagnostic"] = describe(d);
    for (const auto& e : growth_catalog())
        if (e.spec == o.p && e.analytic) rep.result["analytic"] = to_string(*e.analytic);
    std::optional<DivergenceReport> shifted;
    if (o.lambda) {
        const auto s = shift_compare(p, *o.lambda);
        shifted = s.shifted;
        rep.result["shifted"] = describe(s.shifted);
        rep.result["increment_ratio"] = s.increment_ratio;
    }
    if (!o.expect.empty()) {
        const std::string want = normalize_verdict(o.expect);
        rep.pass = to_string(d.verdict) == want && (!shifted || to_string(shifted->verdict) == want);
        if (!rep.pass) rep.message = "verdict differs from --expect " + want;
    }
    if (!out.csv.empty()) {
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < d.octave_increments.size(); ++k) {
            std::vector<double> row{static_cast<double>(k + 1), d.octave_increments[k]};
            if (shifted) row.push_back(shifted->octave_increments[k]);
            rows.push_back(std::move(row));
        }
        std::vector<std::string> cols{"k", "increment"};
        if (shifted) cols.push_back("shifted_increment");
        write_csv(out.csv, cols, rows);
    }
    maybe_plot(out, "k", "increment", false, true);
}

}  // namespace heatmv::cli
