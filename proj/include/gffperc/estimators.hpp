#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gffperc {

/// Mergeable per-point counters. All fields are integers so pooled runs
/// reproduce a single run exactly.
struct Tally {
  std::int64_t trials = 0;
  /// Trials passing the conditioning event (all trials when unconditional).
  std::int64_t accepted = 0;
  std::int64_t hits = 0;
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;
  /// Value counts among accepted trials, for quantiles.
  std::map<std::int64_t, std::int64_t> histogram;

  void merge(const Tally& other);
  friend bool operator==(const Tally&, const Tally&) = default;
};

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// hits / trials with the binomial standard error.
Estimate proportion(const Tally& t);
/// Mean of the accepted values with the sample standard error.
Estimate mean_value(const Tally& t);
/// Median of the accepted values; the error is half the width of the
/// distribution-free 95% rank interval divided by 1.96.
Estimate median_value(const Tally& t);
/// Lower quantile q in [0, 1] of the histogram (nearest-rank).
std::int64_t quantile(const std::map<std::int64_t, std::int64_t>& histogram, double q);

struct FitPoint {
  double scale = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
};

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  /// Set when a jackknife over replica blocks replaced the regression error.
  bool jackknife = false;
  std::size_t points_used = 0;
  std::vector<std::string> warnings;
};

/// Least squares of log(estimate) on log(scale), weighted by the delta-method
/// variance stderr^2 / estimate^2. Falls back to equal weights if any error
/// is zero. Nonpositive estimates are dropped with a warning; fewer than
/// three usable points is an error.
ExponentFit fit_exponent(const std::vector<FitPoint>& points);

/// Replaces the fit's interval by a delete-one-block jackknife: `leave_out`
/// holds, for each block, the points estimated without that block.
void apply_jackknife(ExponentFit& fit, const std::vector<std::vector<FitPoint>>& leave_out);

}  // namespace gffperc
