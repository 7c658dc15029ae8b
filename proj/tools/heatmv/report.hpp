#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatmv/types.hpp"

namespace heatmv::cli {

using nlohmann::json;

/// Exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFail = 2;

struct Tolerance {
    double value;
    std::string source;  // "default" or "user"
};

/// Envelope shared by all subcommands.
struct Report {
    std::string subcommand;
    json config = json::object();
    std::map<std::string, Tolerance> tolerances;
    json result = json::object();
    bool pass = true;
    std::string message;
};

/// Versioned JSON document. `timestamp` is the only run-dependent field.
[[nodiscard]] json render(const Report& r, bool with_timestamp = true);

/// Writes the report to `path`, or stdout for "" or "-".
void write_report(const Report& r, const std::string& path);

/// Plain CSV: a header row then numeric rows with round-trip precision.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Matplotlib script that plots column `y` against column `x` of `csv`.
void write_plot_script(const std::string& path, const std::string& csv, const std::string& x, const std::string& y,
                       bool log_x = false, bool log_y = false);

json to_json(const SpaceTimePoint& p);
json to_json(const DomainBox& b);

/// "x1,...,xn,t" -> point with n = count - 1. Throws PreconditionError.
[[nodiscard]] SpaceTimePoint parse_point(const std::vector<double>& values);

}  // namespace heatmv::cli
