#include "gffperc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gffperc {

void Tally::merge(const Tally& other) {
  trials += other.trials;
  accepted += other.accepted;
  hits += other.hits;
  sum += other.sum;
  sum_sq += other.sum_sq;
  for (const auto& [v, c] : other.histogram) histogram[v] += c;
}

Estimate proportion(const Tally& t) {
  if (t.trials == 0) return {};
  const double n = static_cast<double>(t.trials);
  const double p = static_cast<double>(t.hits) / n;
  return {p, std::sqrt(std::max(0.0, p * (1.0 - p)) / n)};
}

Estimate mean_value(const Tally& t) {
  if (t.accepted == 0) return {};
  const double n = static_cast<double>(t.accepted);
  const double m = static_cast<double>(t.sum) / n;
  if (t.accepted < 2) return {m, 0.0};
  const double var = std::max(0.0, (static_cast<double>(t.sum_sq) - n * m * m) / (n - 1.0));
  return {m, std::sqrt(var / n)};
}

std::int64_t quantile(const std::map<std::int64_t, std::int64_t>& histogram, double q) {
  std::int64_t total = 0;
  for (const auto& [v, c] : histogram) total += c;
  if (total == 0) throw std::invalid_argument("quantile of an empty histogram");
  q = std::clamp(q, 0.0, 1.0);
  const auto rank = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(q * total)));
  std::int64_t seen = 0;
  for (const auto& [v, c] : histogram) {
    seen += c;
    if (seen >= rank) return v;
  }
  return histogram.rbegin()->first;
}

Estimate median_value(const Tally& t) {
  if (t.histogram.empty()) return {};
  const double n = static_cast<double>(t.accepted);
  const double med = static_cast<double>(quantile(t.histogram, 0.5));
  const double half = 1.96 * std::sqrt(n) / 2.0 / n;
  const double lo = static_cast<double>(quantile(t.histogram, 0.5 - half));
  const double hi = static_cast<double>(quantile(t.histogram, 0.5 + half));
  return {med, (hi - lo) / (2.0 * 1.96)};
}

namespace {

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  std::size_t used = 0;
};

Regression regress(const std::vector<FitPoint>& points, std::vector<std::string>* warnings) {
  std::vector<double> x, y, w;
  bool weighted = true;
  for (const auto& p : points) {
    if (!(p.estimate > 0.0) || !(p.scale > 0.0)) {
      if (warnings)
        warnings->push_back("dropped point at scale " + std::to_string(p.scale) +
                            " with nonpositive estimate");
      continue;
    }
    x.push_back(std::log(p.scale));
    y.push_back(std::log(p.estimate));
    const double s = p.stderr_ / p.estimate;
    if (!(s > 0.0)) weighted = false;
    w.push_back(s > 0.0 ? 1.0 / (s * s) : 1.0);
  }
  if (x.size() < 3) throw std::invalid_argument("exponent fit needs at least three positive points");
  if (!weighted) std::fill(w.begin(), w.end(), 1.0);
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("exponent fit needs distinct scales");
  Regression r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.used = x.size();
  if (weighted) {
    r.slope_se = std::sqrt(1.0 / sxx);
  } else {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - r.intercept - r.slope * x[i];
      rss += e * e;
    }
    r.slope_se = x.size() > 2 ? std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx) : 0.0;
  }
  return r;
}

}  // namespace

ExponentFit fit_exponent(const std::vector<FitPoint>& points) {
  ExponentFit fit;
  const Regression r = regress(points, &fit.warnings);
  fit.slope = r.slope;
  fit.intercept = r.intercept;
  fit.slope_se = r.slope_se;
  fit.ci_low = r.slope - 1.96 * r.slope_se;
  fit.ci_high = r.slope + 1.96 * r.slope_se;
  fit.points_used = r.used;
  return fit;
}

void apply_jackknife(ExponentFit& fit, const std::vector<std::vector<FitPoint>>& leave_out) {
  std::vector<double> slopes;
  for (const auto& pts : leave_out) {
    try {
      slopes.push_back(regress(pts, nullptr).slope);
    } catch (const std::invalid_argument&) {
      // A block whose removal leaves too few points is skipped.
    }
  }
  if (slopes.size() < 2) {
    fit.warnings.push_back("jackknife skipped: fewer than two usable blocks");
    return;
  }
  const double b = static_cast<double>(slopes.size());
  double mean = 0;
  for (double s : slopes) mean += s / b;
  double ss = 0;
  for (double s : slopes) ss += (s - mean) * (s - mean);
  fit.slope_se = std::sqrt((b - 1.0) / b * ss);
  fit.ci_low = fit.slope - 1.96 * fit.slope_se;
  fit.ci_high = fit.slope + 1.96 * fit.slope_se;
  fit.jackknife = true;
}

}  // namespace gffperc
