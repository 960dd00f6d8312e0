#pragma once

#include <string>
#include <vector>

#include "rdde/controlled.hpp"
#include "rdde/vector_field.hpp"

namespace rdde {

/// How the drift enters the one-step scheme.
///  - Direct: B + f contribute an explicit h-term per step.
///  - Augmented: drift folded into the diffusion against the time-augmented
///    driver (the past segment's time-derivative coefficient is dropped,
///    an O(h) perturbation of the step).
enum class DriftMode { Direct, Augmented };

/// One-step level-2 scheme over one delay length. xi is the past segment on
/// [(k-1)r, kr] (nodes delay_steps+1); the output lives on [kr, (k+1)r],
/// starts at xi's end value, and carries zeta0 = sigma(y, xi) with
/// zeta1 = 0. Throws DivergenceError when |y| exceeds 1e12.
DelayedControlledSegment solve_segment(const DelayedControlledSegment& xi,
                                       const DelayedRoughPath& rp, const VectorFieldBundle& vf,
                                       DriftMode mode = DriftMode::Direct);

/// Segments 0..n of the semiflow; element 0 is the input segment.
std::vector<DelayedControlledSegment> semiflow(const DelayedControlledSegment& xi,
                                               const DelayedRoughPath& rp,
                                               const VectorFieldBundle& vf, int n,
                                               DriftMode mode = DriftMode::Direct);

/// Per-segment (sup |y|, controlled norm, A = 1 + rough path norm over the
/// segment) for empirical growth inspection.
struct SegmentDiagnostic {
  double sup = 0.0;
  double norm = 0.0;
  double A = 0.0;
};

std::vector<SegmentDiagnostic> solution_norm_diagnostic(
    const std::vector<DelayedControlledSegment>& segments, const DelayedRoughPath& rp,
    double beta);

/// CSV rows (segment, t, y..., yprime...).
void write_trajectory_csv(const std::vector<DelayedControlledSegment>& segments,
                          const std::string& path);

}  // namespace rdde
