#pragma once

#include <vector>

#include "rdde/controlled.hpp"

namespace rdde {

/// Delayed rough integral over grid nodes [a, b] by compensated sums:
///   value_k = sum_{j<k} m_j X_j + zeta0_j XX_j + zeta1_j XX(-r)_j.
/// Two shapes, dispatched on the integrand:
///  - operator-valued integrand (cols == d, the compose_sigma shape): the
///    first-order term is the matrix-vector product m_j X_j and the
///    second-order terms contract zeta's d-index against the area's first
///    slot; output is vector-valued with output zeta0_k = m_k (local
///    expansion convention).
///  - vector-valued integrand (cols == 1, d > 1): the tensor integral
///    int m (x) dX, output rows x d, flattened column-major.
/// The output is a plain controlled segment (zeta1 = 0); additivity over
/// adjacent intervals and linearity in the integrand are exact.
///
/// Well-posedness needs theta + gamma > 1 and beta + 2 gamma > 1 with
/// gamma taken from the lift; violations throw ConfigError.
DelayedControlledSegment delayed_rough_integral(const DelayedControlledSegment& integrand,
                                                const DelayedRoughPath& rp, int a, int b,
                                                double beta = 0.49, double theta = 0.98);

/// Dyadic-coarsening convergence report for the compensated sum: the sum
/// over every stride-2^l subgrid of [a,b] against the full-resolution
/// value, with the least-squares rate of log defect vs log mesh.
struct SewingReport {
  std::vector<int> strides;
  std::vector<double> defects;  // endpoint-value distance to the finest sum
  double fitted_rate = 0.0;     // NaN when fewer than two nonzero defects
};

SewingReport sewing_defect(const DelayedControlledSegment& integrand, const DelayedRoughPath& rp,
                           int a, int b, int levels);

}  // namespace rdde
