#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heatmv/report.hpp"

namespace heatmv::cli {

/// Output paths shared by every subcommand.
struct Outputs {
    std::string report = "-";
    std::string csv;
    std::string plot_script;
};

struct CatalogOptions {
    std::string equation;  // filter; empty = all
    std::size_t n = 0;     // filter; 0 = all
};

struct MvOptions {
    std::string field;
    std::vector<double> center;  // x1,...,xn,t; empty = catalog probe
    std::vector<double> radii;   // empty = catalog probe radii
    std::string equation;        // empty = catalog equation
    std::string method = "auto";
    double tol = 0.0;  // 0 = per-dimension default
    std::string expect;
    std::uint64_t seed = 1;
};

struct SolveOptions {
    std::string equation = "heat";
    std::size_t n = 1;
    double half_width = 6.0;
    double t_lo = 0.0, t_hi = 1.0;
    double h = 0.05, dt = 0.01, theta = 0.5;
    std::string initial = "fixture.bump";
    std::string boundary;  // empty = same as initial
    std::string exact;
    double max_error = 0.0;  // 0 = report only
    std::string header;      // JSON sidecar
};

struct GeometryOptions {
    std::string family = "omega";
    std::vector<double> center;
    double radius = 1.0;
    std::size_t m = 0;
    std::size_t slices = 32;
    std::size_t angular = 64;
};

struct KernelOptions {
    std::string family = "classical";
    std::vector<double> center;
    double radius = 1.0;
    std::size_t m = 0;
    std::size_t ny = 64, ns = 64;
};

struct MaxPrinOptions {
    SolveOptions solve;
    std::optional<double> t0;
    double strong_tol = 0.0;  // 0 = 1e-9 x data scale
    bool corrupt = false;     // bump one interior node before the checks
};

struct HarnackMintqOptions {
    std::string field = "ou.const";
    std::vector<double> center;
    std::vector<double> radii{0.0625, 0.125, 0.25, 0.5};
    double q = 2.0;
    std::size_t samples = 1 << 17;
    std::uint64_t seed = 1;
};

struct HarnackFamilyOptions {
    std::size_t n = 1;
    std::vector<std::size_t> counts{21, 41, 81};
    std::vector<double> x0{0.2};
    double t0 = 0.3;
    double gap = 0.2;  // K occupies t in [t0 - gap - 0.1, t0 - gap]; 0 puts K on the slice t = t0
    double spacing = 0.25;
};

struct GrowthOptions {
    std::string p;
    double r_max = 1 << 20;
    std::optional<double> lambda;
    std::size_t per_octave = 64;
    std::string expect;
    bool list = false;
};

void run_catalog(const CatalogOptions& o, const Outputs& out, Report& rep);
void run_mv(const MvOptions& o, const Outputs& out, Report& rep, bool classify_only);
void run_solve(const SolveOptions& o, const Outputs& out, Report& rep);
void run_geometry_export(const GeometryOptions& o, const Outputs& out, Report& rep);
void run_kernel_export(const KernelOptions& o, const Outputs& out, Report& rep);
void run_maxprin(const MaxPrinOptions& o, const Outputs& out, Report& rep);
void run_harnack_mintq(const HarnackMintqOptions& o, const Outputs& out, Report& rep);
void run_harnack_family(const HarnackFamilyOptions& o, const Outputs& out, Report& rep);
void run_growth(const GrowthOptions& o, const Outputs& out, Report& rep);

}  // namespace heatmv::cli
