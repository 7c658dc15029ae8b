#include <iostream>

#include <CLI11.hpp>

#include "heatmv/commands.hpp"
#include "heatmv/version.hpp"

using namespace heatmv;
using namespace heatmv::cli;

namespace {

void add_outputs(CLI::App* sub, Outputs& out) {
    sub->add_option("--report", out.report, "JSON report path ('-' for stdout)");
    sub->add_option("--csv", out.csv, "CSV plot-data path");
    sub->add_option("--plot-script", out.plot_script, "write a matplotlib template for the CSV");
}

void add_solve_options(CLI::App* sub, SolveOptions& o) {
    sub->add_option("--equation", o.equation, "heat | ou | hermite")->check(CLI::IsMember({"heat", "ou", "hermite"}));
    sub->add_option("--n", o.n, "spatial dimension")->check(CLI::Range(1, 2));
    sub->add_option("--half-width", o.half_width, "box |x_i| <= half-width")->check(CLI::PositiveNumber);
    sub->add_option("--t-lo", o.t_lo, "initial time");
    sub->add_option("--t-hi", o.t_hi, "final time");
    sub->add_option("--dx", o.h, "grid spacing")->check(CLI::PositiveNumber);
    sub->add_option("--dt", o.dt, "time step")->check(CLI::PositiveNumber);
    sub->add_option("--theta", o.theta, "0 explicit, 0.5 Crank-Nicolson, 1 implicit")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--initial", o.initial, "catalog id or const:c");
    sub->add_option("--boundary", o.boundary, "catalog id or const:c (default: --initial)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"heatmv: mean-value formulas and verification harness for the heat, OU and Hermite equations"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "TOML config file; flags override file values");
    app.require_subcommand(1);

    Outputs out;
    CatalogOptions cat;
    MvOptions mv;
    SolveOptions solve;
    GeometryOptions geo;
    KernelOptions ker;
    MaxPrinOptions mp;
    HarnackMintqOptions hm;
    HarnackFamilyOptions hf;
    GrowthOptions gr;

    auto* c_cat = app.add_subcommand("catalog", "list closed-form catalog fields");
    c_cat->add_option("--equation", cat.equation, "filter by equation tag");
    c_cat->add_option("--n", cat.n, "filter by dimension");
    add_outputs(c_cat, out);

    auto add_mv = [&](CLI::App* sub) {
        sub->add_option("--field", mv.field, "catalog id")->required();
        sub->add_option("--center", mv.center, "x1,...,xn,t (default: the catalog probe)")->delimiter(',');
        sub->add_option("--r,--radii", mv.radii, "radius list")->delimiter(',')->check(CLI::PositiveNumber);
        sub->add_option("--equation", mv.equation, "heat | ou | hermite (default: the field's tag)");
        sub->add_option("--method", mv.method, "auto | tensor | montecarlo");
        sub->add_option("--tol", mv.tol, "residual tolerance (default 1e-6 for n=1, 1e-5 for n=2)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--expect", mv.expect, "temperature | sub | super | neither");
        sub->add_option("--seed", mv.seed, "Monte Carlo seed");
        add_outputs(sub, out);
    };
    auto* c_mv = app.add_subcommand("mv-check", "mean-value residuals and classification at a point");
    add_mv(c_mv);
    auto* c_cls = app.add_subcommand("classify", "classify a point as temperature / sub / super / neither");
    add_mv(c_cls);

    auto* c_solve = app.add_subcommand("solve", "theta-scheme solve on a box");
    add_solve_options(c_solve, solve);
    c_solve->add_option("--exact", solve.exact, "catalog id to measure the max error against");
    c_solve->add_option("--max-error", solve.max_error, "fail when the max error exceeds this")
        ->check(CLI::PositiveNumber);
    c_solve->add_option("--header", solve.header, "JSON header sidecar path (default: <csv>.json)");
    add_outputs(c_solve, out);

    auto* c_geo = app.add_subcommand("geometry", "ball geometry");
    c_geo->require_subcommand(1);
    auto* c_geo_exp = c_geo->add_subcommand("export", "ball boundary polylines");
    c_geo_exp->add_option("--family", geo.family, "omega | omega_m | xi | gamma");
    c_geo_exp->add_option("--center", geo.center, "x1,...,xn,t")->delimiter(',')->required();
    c_geo_exp->add_option("--r", geo.radius, "radius (R for gamma)")->check(CLI::PositiveNumber);
    c_geo_exp->add_option("--m", geo.m, "descent dimension");
    c_geo_exp->add_option("--slices", geo.slices, "time levels");
    c_geo_exp->add_option("--angular", geo.angular, "points per circle (n = 2)");
    add_outputs(c_geo_exp, out);

    auto* c_ker = app.add_subcommand("kernel", "mean-value kernels");
    c_ker->require_subcommand(1);
    auto* c_ker_exp = c_ker->add_subcommand("export", "kernel values on a (y, s) grid through the ball");
    c_ker_exp->add_option("--family", ker.family,
                          "classical | ou | hermite | descent-classical | descent-ou | descent-hermite");
    c_ker_exp->add_option("--center", ker.center, "x1,...,xn,t")->delimiter(',')->required();
    c_ker_exp->add_option("--r", ker.radius, "radius")->check(CLI::PositiveNumber);
    c_ker_exp->add_option("--m", ker.m, "descent dimension");
    c_ker_exp->add_option("--ny", ker.ny, "grid points in y");
    c_ker_exp->add_option("--ns", ker.ns, "grid points in s");
    add_outputs(c_ker_exp, out);

    auto* c_mp = app.add_subcommand("maxprin", "weak/strong maximum principle and propagation checks on a solve");
    add_solve_options(c_mp, mp.solve);
    c_mp->add_option("--t0", mp.t0, "top of the checked cylinder (default: final time)");
    c_mp->add_option("--strong-tol", mp.strong_tol, "strong-max tolerance (default 1e-9 x data scale)");
    c_mp->add_flag("--corrupt", mp.corrupt, "bump one interior node (negative control)");
    add_outputs(c_mp, out);

    auto* c_h = app.add_subcommand("harnack", "Harnack quotients");
    c_h->require_subcommand(1);
    auto* c_hm = c_h->add_subcommand("mintq", "sup over Gamma_R against the q-mean over Gamma_4R");
    c_hm->add_option("--field", hm.field, "catalog id");
    c_hm->add_option("--center", hm.center, "x1,...,xn,t (default: origin, t = 0.5)")->delimiter(',');
    c_hm->add_option("--R", hm.radii, "radius list, each <= 1; Gamma_4R must fit the field domain")->delimiter(',');
    c_hm->add_option("--q", hm.q, "exponent")->check(CLI::PositiveNumber);
    c_hm->add_option("--samples", hm.samples, "Monte Carlo samples per radius");
    c_hm->add_option("--seed", hm.seed, "Monte Carlo seed");
    add_outputs(c_hm, out);
    auto* c_hf = c_h->add_subcommand("family", "empirical kappa over growing pullback families");
    c_hf->add_option("--n", hf.n, "spatial dimension")->check(CLI::Range(1, 2));
    c_hf->add_option("--counts", hf.counts, "family sizes")->delimiter(',');
    c_hf->add_option("--x0", hf.x0, "point-mass location")->delimiter(',');
    c_hf->add_option("--t0", hf.t0, "point-mass time");
    c_hf->add_option("--gap", hf.gap, "time gap below t0 (0 puts K on the top slice)");
    c_hf->add_option("--spacing", hf.spacing, "centre spacing");
    add_outputs(c_hf, out);

    auto* c_gr = app.add_subcommand("growth", "Tacklind growth-class diagnostics");
    c_gr->add_option("--p", gr.p, "growth spec, e.g. pow:1.5, rlog:2, iterlog, osc:1");
    c_gr->add_option("--rmax", gr.r_max, "horizon")->check(CLI::Range(2.0, 1e300));
    c_gr->add_option("--lambda", gr.lambda, "also diagnose p + lambda r");
    c_gr->add_option("--per-octave", gr.per_octave, "grid points per doubling");
    c_gr->add_option("--expect", gr.expect, "diverging | converging | inconclusive");
    c_gr->add_flag("--list", gr.list, "list the built-in growth catalog");
    add_outputs(c_gr, out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    Report rep;
    try {
        if (c_cat->parsed()) {
            rep.subcommand = "catalog";
            run_catalog(cat, out, rep);
        } else if (c_mv->parsed()) {
            rep.subcommand = "mv-check";
            run_mv(mv, out, rep, false);
        } else if (c_cls->parsed()) {
            rep.subcommand = "classify";
            run_mv(mv, out, rep, true);
        } else if (c_solve->parsed()) {
            rep.subcommand = "solve";
            run_solve(solve, out, rep);
        } else if (c_geo_exp->parsed()) {
            rep.subcommand = "geometry export";
            run_geometry_export(geo, out, rep);
        } else if (c_ker_exp->parsed()) {
            rep.subcommand = "kernel export";
            run_kernel_export(ker, out, rep);
        } else if (c_mp->parsed()) {
            rep.subcommand = "maxprin";
            run_maxprin(mp, out, rep);
        } else if (c_hm->parsed()) {
            rep.subcommand = "harnack mintq";
            run_harnack_mintq(hm, out, rep);
        } else if (c_hf->parsed()) {
            rep.subcommand = "harnack family";
            run_harnack_family(hf, out, rep);
        } else if (c_gr->parsed()) {
            rep.subcommand = "growth";
            run_growth(gr, out, rep);
        }
        write_report(rep, out.report);
    } catch (const ConvergenceError& e) {
        std::cerr << "heatmv: " << e.what() << "\n";
        return kExitFail;
    } catch (const std::exception& e) {
        std::cerr << "heatmv: " << e.what() << "\n";
        return kExitUsage;
    }
    return rep.pass ? kExitPass : kExitFail;
}
