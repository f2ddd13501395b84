// CSV traces and the plain-text run summary.
//
//   sensors.csv      k, t, theta, r_x, r_y, omega_z, A_x, A_y
//   derivatives.csv  k, t, then <channel>, <channel>_eta, <channel>_v2 per channel
//   residuals.csv    k, t, L_s_x .. R_a_z
//   metrics.csv      k, t, e_*, c_*, flag_* (empty until defined)
//   diagnostic.csv   k, t, pattern, verdict (empty until classified)
//   summary.txt      key: value lines
#pragma once

#include <filesystem>
#include <string>

#include "kinfault/pipeline.hpp"

namespace kinfault {

/// Shortest round-trip text of a double (17 significant digits).
std::string format_double(double v);

std::string summary_text(const RunResult& run);

/// Creates `dir` if needed. Throws std::runtime_error naming the path on
/// I/O failure.
void write_traces(const RunResult& run, const std::filesystem::path& dir);

}  // namespace kinfault
