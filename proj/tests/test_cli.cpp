#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "heatmv/commands.hpp"
#include "heatmv/types.hpp"
#include "heatmv/version.hpp"

using namespace heatmv;
using namespace heatmv::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "heatmv_test_cli";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outputs quiet() {
    Outputs o;
    o.report = "";
    return o;
}

}  // namespace

TEST_CASE("mv-check on a catalog OU temperature passes with a small residual") {
    MvOptions o;
    o.field = "ou.linear";
    o.center = {1.0, 0.0};
    o.radii = {0.5};
    o.equation = "ou";
    Report rep;
    run_mv(o, quiet(), rep, false);
    CHECK(rep.pass);
    CHECK(rep.result["classification"] == "temperature");
    CHECK(rep.tolerances.at("residual").value == 1e-6);
    CHECK(rep.tolerances.at("residual").source == "default n=1");
    for (const auto& row : rep.result["residuals"]) CHECK(std::fabs(row["residual"].get<double>()) <= 1e-6);
}

TEST_CASE("mv-check labels x^2 under heat as a subtemperature") {
    MvOptions o;
    o.field = "heat.quadratic-bad";
    o.equation = "heat";
    Report rep;
    run_mv(o, quiet(), rep, true);
    CHECK(rep.pass);
    CHECK(rep.result["classification"] == "sub");
}

TEST_CASE("mv-check fails when the expectation is wrong") {
    MvOptions o;
    o.field = "heat.quadratic-bad";
    o.equation = "heat";
    o.expect = "temperature";
    Report rep;
    run_mv(o, quiet(), rep, true);
    CHECK_FALSE(rep.pass);
}

TEST_CASE("growth pow:1 reports a diverging trend") {
    GrowthOptions o;
    o.p = "pow:1.0";
    o.r_max = 1048576;
    Report rep;
    run_growth(o, quiet(), rep);
    CHECK(rep.pass);
    CHECK(rep.result["diagnostic"]["verdict"] == "diverging-trend");
}

TEST_CASE("reports embed config, module versions and tolerance provenance") {
    MvOptions o;
    o.field = "ou.linear";
    o.center = {1.0, 0.0};
    o.radii = {0.5};
    Report rep;
    rep.subcommand = "mv-check";
    run_mv(o, quiet(), rep, false);
    const json j = render(rep);
    CHECK(j["schema_version"].is_number_integer());
    CHECK(j["subcommand"] == "mv-check");
    CHECK(j["config"]["field"] == "ou.linear");
    CHECK(j["config"]["seed"] == 1);
    for (const char* m : {"transference", "geometry", "kernels", "quadrature", "solvers", "growth", "verify", "cli"})
        CHECK(j["module_versions"][m] == std::string(kVersion));
    CHECK(j["tolerances"]["residual"]["source"] == "default n=1");
    CHECK(j.contains("timestamp"));
    CHECK_FALSE(render(rep, false).contains("timestamp"));
}

TEST_CASE("identical config and seed give identical reports") {
    SUBCASE("Monte Carlo mv-check") {
        MvOptions o;
        o.field = "ou.linear";
        o.center = {1.0, 0.0};
        o.radii = {0.5};
        o.method = "montecarlo";
        o.seed = 7;
        Report a, b;
        run_mv(o, quiet(), a, false);
        run_mv(o, quiet(), b, false);
        CHECK(render(a, false).dump() == render(b, false).dump());
        o.seed = 8;
        Report c;
        run_mv(o, quiet(), c, false);
        CHECK(render(a, false).dump() != render(c, false).dump());
    }
    SUBCASE("harnack mintq") {
        HarnackMintqOptions o;
        o.radii = {0.25};
        o.samples = 4096;
        Report a, b;
        run_harnack_mintq(o, quiet(), a);
        run_harnack_mintq(o, quiet(), b);
        CHECK(render(a, false).dump() == render(b, false).dump());
    }
}

TEST_CASE("solve writes CSV and a header sidecar") {
    SolveOptions o;
    o.initial = "heat.fundamental";
    o.exact = "heat.fundamental";
    o.t_lo = -0.7;
    o.t_hi = -0.5;
    o.h = 0.1;
    o.dt = 0.025;
    o.half_width = 3;
    o.max_error = 1e-2;
    Outputs out = quiet();
    out.csv = scratch("solve.csv").string();
    out.plot_script = scratch("solve.py").string();
    Report rep;
    run_solve(o, out, rep);
    CHECK(rep.pass);
    CHECK(rep.result["max_error"].get<double>() < 1e-2);
    const std::string csv = slurp(out.csv);
    REQUIRE_FALSE(csv.empty());
    CHECK(csv.substr(0, csv.find('\n')).find(',') != std::string::npos);
    const json header = json::parse(slurp(out.csv + ".json"));
    CHECK(header["csv_columns"].size() == 3);
    CHECK(slurp(out.plot_script).find(std::filesystem::path(out.csv).filename().string()) != std::string::npos);
}

TEST_CASE("maxprin: clean run passes, corrupted run fails") {
    MaxPrinOptions o;
    Report clean;
    run_maxprin(o, quiet(), clean);
    CHECK(clean.pass);
    o.corrupt = true;
    Report bad;
    run_maxprin(o, quiet(), bad);
    CHECK_FALSE(bad.pass);
    CHECK(bad.result["strong"]["violation"] == true);
    CHECK(bad.result["weak"]["violation"] == true);
}

TEST_CASE("write_csv round-trips doubles") {
    const auto p = scratch("rt.csv");
    const double v = 0.1 + 0.2;
    write_csv(p.string(), {"a", "b"}, {{v, -1e-300}});
    std::ifstream in(p);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "a,b");
    const auto comma = row.find(',');
    CHECK(std::stod(row.substr(0, comma)) == v);
    CHECK(std::stod(row.substr(comma + 1)) == -1e-300);
}

TEST_CASE("parse_point") {
    const auto p = parse_point({1.0, 2.0, 0.5});
    CHECK(p.dim() == 2);
    CHECK(p.x[1] == 2.0);
    CHECK(static_cast<double>(p.t) == 0.5);
    CHECK_THROWS_AS((void)parse_point({0.5}), PreconditionError);
    CHECK_THROWS_AS((void)parse_point({}), PreconditionError);
}

TEST_CASE("unknown catalog id and missing equation are usage errors") {
    MvOptions o;
    o.field = "no.such.field";
    Report rep;
    CHECK_THROWS_AS(run_mv(o, quiet(), rep, false), PreconditionError);
}
