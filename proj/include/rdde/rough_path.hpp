#pragma once

#include <memory>
#include <vector>

#include "rdde/sample_path.hpp"
#include "rdde/types.hpp"

namespace rdde {

/// Delayed rough path on a uniform coarse grid: increments X, Levy area XX
/// and delayed Levy area XX(-r), stored per adjacent interval only. Values
/// over non-adjacent node pairs are reconstructed on demand through the
/// Chen identities, so both identities hold for every grid triple by
/// construction.
///
/// Node i corresponds to time t0 + i*h, i in [0, n_intervals]. Increments
/// are additionally stored for the pre-window [t0 - r, t0] so that delayed
/// lookups X_{s-r,t-r} stay on grid; negative node indices down to
/// -delay_steps are valid for increment().
class DelayedRoughPath {
 public:
  int dim = 0;
  double t0 = 0.0;
  double h = 0.0;
  int n_intervals = 0;
  int delay_steps = 0;  // r / h
  double gamma = 0.45;
  Convention convention = Convention::Ito;

  double delay() const { return delay_steps * h; }
  double t_end() const { return t0 + n_intervals * h; }
  double time_of(int node) const { return t0 + node * h; }

  /// Grid node of a time; throws on off-grid or out-of-range times.
  int node_of(double t) const;

  /// X_{t_i, t_j} for -delay_steps <= i, j <= n_intervals.
  Vec increment(int i, int j) const;

  /// XX_{t_i, t_j}, 0 <= i <= j <= n_intervals (Chen reconstruction).
  Mat levy_area(int i, int j) const;

  /// XX_{t_i, t_j}(-r), same index range.
  Mat delayed_levy_area(int i, int j) const;

  const Vec& adj_increment(int interval) const { return incr_[interval + delay_steps]; }
  const Mat& adj_area(int interval) const { return area_[interval]; }
  const Mat& adj_delayed_area(int interval) const { return darea_[interval]; }

  /// Fine sample the lift was built from; kept for time augmentation.
  std::shared_ptr<const SamplePath> fine;

  // Raw storage access for serialization. incr_ is indexed by extended
  // interval e = interval + delay_steps, e in [0, n_intervals + delay_steps).
  std::vector<Vec>& raw_increments() { return incr_; }
  std::vector<Mat>& raw_areas() { return area_; }
  std::vector<Mat>& raw_delayed_areas() { return darea_; }
  const std::vector<Vec>& raw_increments() const { return incr_; }
  const std::vector<Mat>& raw_areas() const { return area_; }
  const std::vector<Mat>& raw_delayed_areas() const { return darea_; }

 private:
  std::vector<Vec> incr_;
  std::vector<Mat> area_;
  std::vector<Mat> darea_;
};

/// Ito lift: adjacent areas are left-point Riemann sums over the fine grid,
///   XX_j ~ sum (X_u - X_{t_j}) (x) dX_u,  XX_j(-r) ~ sum (X_{u-r} - X_{t_j-r}) (x) dX_u.
/// The coarse window is the largest grid fitting [path.t_start + r, path.t_end].
/// With exact_scalar_area (d = 1 only) the plain area is the closed form
/// (X_{s,t}^2 - (t-s))/2, which in one dimension is what the fine sums
/// converge to; the delayed area is still a fine sum.
DelayedRoughPath lift_ito(const SamplePath& path, double h, double r, double gamma = 0.45,
                          bool exact_scalar_area = false);

/// Stratonovich lift: the Ito lift with (t-s)/2 I added to the plain area.
/// The delayed area is shared between both conventions.
DelayedRoughPath lift_stratonovich(const SamplePath& path, double h, double r,
                                   double gamma = 0.45, bool exact_scalar_area = false);

struct HoelderComponents {
  double path = 0.0;          // ||X||_{gamma;[a,b]}
  double path_delayed = 0.0;  // ||X||_{gamma;[a-r,b-r]}
  double area = 0.0;          // ||XX||_{2gamma;[a,b]}
  double delayed_area = 0.0;  // ||XX(-r)||_{2gamma;[a,b]}
  double total() const;       // ||X||_g + ||X||_g,shift + sqrt(area) + sqrt(darea)
};

/// Grid-sup estimate of the delayed rough path norm over [a,b] (node
/// indices). A lower bound of the analytic norm; diagnostics only.
HoelderComponents hoelder_components(const DelayedRoughPath& rp, int a, int b);
double hoelder_norm(const DelayedRoughPath& rp, int a, int b);

/// Appends t -> t as smooth zeroth component: X^0_{s,t} = t-s, cross areas
/// from fine sums, time-time area (t-s)^2/2. Stripping the added row and
/// column recovers the input exactly.
DelayedRoughPath augment_time(const DelayedRoughPath& rp);

/// 1/3 < alpha < beta < gamma < 1/2 together with
/// (1-alpha)(1/2-beta) / ((1-beta)(1-2 alpha)) < beta - alpha.
bool validate_exponents(double alpha, double beta, double gamma);
bool validate_exponents(double alpha, double beta, double gamma, std::string& reason);

}  // namespace rdde
