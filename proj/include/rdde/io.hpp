#pragma once

#include <string>

#include "rdde/ergodic.hpp"
#include "rdde/rough_path.hpp"

namespace rdde {

/// Columnar binary round trip for a lift: header (magic, d, n_intervals,
/// delay_steps, convention, t0, h, gamma), then the extended increments,
/// the adjacent areas and the adjacent delayed areas, all little-endian
/// float64. Bit-exact; the fine sample is not persisted (a loaded lift
/// cannot be time-augmented).
void save_rough_path(const DelayedRoughPath& rp, const std::string& path);
DelayedRoughPath load_rough_path(const std::string& path);

/// JSON report bodies (stable key order, locale-independent numbers).
std::string lyapunov_json(const LyapunovReport& rep);
std::string probe_json(const ProbeReport& rep);
std::string validate_json(double alpha, double beta, double gamma);

/// Write via a temp file in the same directory plus rename, so readers
/// never observe partial content.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace rdde
