#pragma once

#include <memory>
#include <vector>

#include "rdde/rough_path.hpp"
#include "rdde/types.hpp"

namespace rdde {

struct VectorFieldBundle;

/// Delayed controlled path on one grid segment: values m and the two
/// Gubinelli coefficients zeta0 (against X_{s,t}) and zeta1 (against
/// X_{s-r,t-r}). A plain controlled path is the zeta1 == 0 case; the
/// remainder m# is always derived from (m, zeta0, zeta1), never stored.
///
/// Values are vectors of size rows*cols. cols == 1 is the ordinary
/// vector-valued case; cols == base->dim flags an operator-valued path
/// (a rows x cols matrix per node, column-major), the shape produced by
/// compose_sigma and consumed by the contracted rough integral.
struct DelayedControlledSegment {
  std::shared_ptr<const DelayedRoughPath> base;
  int start_node = 0;
  int rows = 0;
  int cols = 1;
  std::vector<Vec> m;      // size n_nodes, each rows*cols
  std::vector<Mat> zeta0;  // each (rows*cols) x d
  std::vector<Mat> zeta1;

  int n_nodes() const { return static_cast<int>(m.size()); }
  int vdim() const { return rows * cols; }
  double t_begin() const { return base->time_of(start_node); }
  double grid_step() const { return base->h; }

  /// Value reshaped as a rows x cols matrix (operator-valued paths).
  Mat value_matrix(int node) const;

  bool is_plain() const;  // zeta1 identically zero

  static DelayedControlledSegment zero(std::shared_ptr<const DelayedRoughPath> base,
                                       int start_node, int n_nodes, int rows);
  static DelayedControlledSegment constant(std::shared_ptr<const DelayedRoughPath> base,
                                           int start_node, int n_nodes, const Vec& value);
};

/// m#_{s,t} = m_{s,t} - zeta0_s X_{s,t} - zeta1_s X_{s-r,t-r}; grid sup of
/// |m#_{s,t}| / (t-s)^theta over all node pairs of the segment.
double remainder_sup(const DelayedControlledSegment& seg, double theta);

/// |m_a| + |zeta0_a| + ||zeta0||_beta + ||m#||_{2beta}, grid-sup version.
/// Throws WrongKindError when zeta1 is not identically zero.
double norm_controlled(const DelayedControlledSegment& seg, double beta);

/// |m_a| + |zeta0_a| + |zeta1_a| + ||zeta0||_beta + ||zeta1||_beta + ||m#||_{2beta}.
double norm_delayed(const DelayedControlledSegment& seg, double beta);

/// The three-exponent diagnostic norm, which also carries ||m||_alpha:
/// |m_a|+|z0_a|+|z1_a| + ||m||_alpha + ||z0||_beta + ||z1||_beta + ||m#||_theta.
/// On a grid all such norms are equivalent; the exponent triple only
/// changes the reported number, so this is used by diagnostics only.
double norm_delayed_general(const DelayedControlledSegment& seg, double alpha, double beta,
                            double theta);

/// Composition with the diffusion field: given the current segment y on
/// [kr,(k+1)r] and its past segment on [(k-1)r,kr], returns the
/// operator-valued delayed controlled path
///   s -> sigma(y_s, past_s)  with
///   zeta0_s = Dx sigma . y'_s,   zeta1_s = Dy sigma . past'_s,
/// where y', past' are the stored zeta0 coefficients of the inputs.
/// Exact at nodes; no discretization error enters the values.
DelayedControlledSegment compose_sigma(const DelayedControlledSegment& y,
                                       const DelayedControlledSegment& past,
                                       const VectorFieldBundle& vf);

/// CSV export of (t, m, zeta0, zeta1) per node.
void write_segment_csv(const DelayedControlledSegment& seg, const std::string& path);

}  // namespace rdde
