#pragma once

namespace heatmv {

inline constexpr const char* kVersion = "1.0.0";
/// Bumped when the JSON report layout changes.
inline constexpr int kReportSchemaVersion = 1;

}  // namespace heatmv
