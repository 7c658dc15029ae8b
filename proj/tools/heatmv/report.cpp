#include "heatmv/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "heatmv/version.hpp"

namespace heatmv::cli {

namespace {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw PreconditionError("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

json render(const Report& r, bool with_timestamp) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["tool"] = "heatmv";
    j["subcommand"] = r.subcommand;
    json modules = json::object();
    for (const char* m : {"transference", "geometry", "kernels", "quadrature", "solvers", "growth", "verify", "cli"})
        modules[m] = kVersion;
    j["module_versions"] = modules;
    j["config"] = r.config;
    json tol = json::object();
    for (const auto& [name, t] : r.tolerances) tol[name] = {{"value", t.value}, {"source", t.source}};
    j["tolerances"] = tol;
    j["status"] = r.pass ? "pass" : "fail";
    if (!r.message.empty()) j["message"] = r.message;
    j["result"] = r.result;
    if (with_timestamp) j["timestamp"] = utc_now();
    return j;
}

void write_report(const Report& r, const std::string& path) {
    const std::string text = render(r).dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    auto out = open_out(path);
    out << text;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    auto out = open_out(path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

void write_plot_script(const std::string& path, const std::string& csv, const std::string& x, const std::string& y,
                       bool log_x, bool log_y) {
    auto out = open_out(path);
    out << "import csv\nimport matplotlib.pyplot as plt\n\n"
        << "with open(" << std::quoted(csv) << ") as f:\n"
        << "    rows = list(csv.DictReader(f))\n"
        << "xs = [float(r[" << std::quoted(x) << "]) for r in rows]\n"
        << "ys = [float(r[" << std::quoted(y) << "]) for r in rows]\n"
        << "plt.plot(xs, ys, \"o-\")\n";
    if (log_x) out << "plt.xscale(\"log\")\n";
    if (log_y) out << "plt.yscale(\"log\")\n";
    out << "plt.xlabel(" << std::quoted(x) << ")\nplt.ylabel(" << std::quoted(y) << ")\n"
        << "plt.savefig(" << std::quoted(csv + ".png") << ", dpi=150)\n";
}

json to_json(const SpaceTimePoint& p) {
    json x = json::array();
    for (double v : p.x) x.push_back(v);
    return {{"x", x}, {"t", static_cast<double>(p.t)}};
}

json to_json(const DomainBox& b) {
    json lo = json::array(), hi = json::array();
    for (double v : b.lo) lo.push_back(v);
    for (double v : b.hi) hi.push_back(v);
    return {{"lo", lo}, {"hi", hi}, {"t_lo", static_cast<double>(b.t_lo)}, {"t_hi", static_cast<double>(b.t_hi)}};
}

SpaceTimePoint parse_point(const std::vector<double>& values) {
    if (values.size() < 2 || values.size() > kMaxDim + 1)
        throw PreconditionError("a point is given as x1,...,xn,t with 1 <= n <= " + std::to_string(kMaxDim));
    SpaceTimePoint p{SpatialVector(values.size() - 1), values.back()};
    for (std::size_t i = 0; i + 1 < values.size(); ++i) p.x[i] = values[i];
    return p;
}

}  // namespace heatmv::cli
