#include "gffperc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "gffperc/clusters.hpp"
#include "gffperc/gff.hpp"
#include "gffperc/lattice.hpp"
#include "gffperc/metric_edges.hpp"
#include "gffperc/pivotal.hpp"
#include "gffperc/potential.hpp"

namespace gffperc {

namespace {

const std::vector<std::pair<Observable, std::string>>& observable_names() {
  static const std::vector<std::pair<Observable, std::string>> names{
      {Observable::TwoPoint, "two_point"},       {Observable::OneArm, "one_arm"},
      {Observable::Crossing, "crossing"},        {Observable::MindistCdf, "mindist_cdf"},
      {Observable::Pivotal, "pivotal"},          {Observable::Heterochromatic, "heterochromatic"}};
  return names;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw SpecError("'" + key + "' expects an integer, got '" + s + "'");
}

std::uint64_t to_unsigned(const std::string& key, const std::string& s) {
  if (!s.empty() && s[0] == '-') throw SpecError("'" + key + "' must be nonnegative");
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw SpecError("'" + key + "' expects a nonnegative integer, got '" + s + "'");
}

double to_real(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw SpecError("'" + key + "' expects a number, got '" + s + "'");
}

int to_int(const std::string& key, const std::string& s) {
  const long long v = to_integer(key, s);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw SpecError("'" + key + "' is out of range");
  return static_cast<int>(v);
}

std::string real_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += f(v[i]);
  }
  return s;
}

}  // namespace

std::string observable_name(Observable o) {
  for (const auto& [k, v] : observable_names())
    if (k == o) return v;
  return "unknown";
}

Observable parse_observable(const std::string& name) {
  std::string n = name;
  std::replace(n.begin(), n.end(), '-', '_');
  for (const auto& [k, v] : observable_names())
    if (v == n) return k;
  throw SpecError("unknown observable '" + name + "'");
}

std::vector<double> ExperimentSpec::chi_grid() const {
  if (!chi.empty()) return chi;
  std::vector<double> g;
  for (int j = 1; j <= 5; ++j) g.push_back(d * std::ldexp(1.0, -j));
  return g;
}

void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  if (key == "observable") {
    spec.observable = parse_observable(value);
  } else if (key == "d") {
    spec.d = to_int(key, value);
  } else if (key == "N") {
    spec.N.clear();
    for (const auto& s : split_list(value)) spec.N.push_back(to_int(key, s));
  } else if (key == "n") {
    spec.n = to_int(key, value);
  } else if (key == "delta") {
    spec.delta = to_real(key, value);
  } else if (key == "chi") {
    spec.chi.clear();
    for (const auto& s : split_list(value)) spec.chi.push_back(to_real(key, s));
  } else if (key == "k") {
    spec.k = to_int(key, value);
  } else if (key == "pad") {
    spec.pad = to_real(key, value);
  } else if (key == "seed") {
    spec.seed = to_unsigned(key, value);
  } else if (key == "replicas") {
    spec.replicas = to_unsigned(key, value);
  } else if (key == "out") {
    spec.out = value;
  } else if (key == "x" || key == "y") {
    auto& p = key == "x" ? spec.x : spec.y;
    p.clear();
    for (const auto& s : split_list(value)) p.push_back(to_int(key, s));
  } else if (key == "domain_radius") {
    spec.domain_radius = to_int(key, value);
  } else if (key == "first_replica") {
    spec.first_replica = to_unsigned(key, value);
  } else if (key == "level") {
    spec.level = to_real(key, value);
  } else if (key == "blocks") {
    spec.blocks = to_int(key, value);
  } else if (key == "threads") {
    spec.threads = to_int(key, value);
  } else {
    throw SpecError("unknown key '" + key + "'");
  }
}

ExperimentSpec parse_spec(std::istream& in) {
  ExperimentSpec spec;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw SpecError("line " + std::to_string(number) + ": expected key = value");
    apply_setting(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read config " + path.string());
  return parse_spec(in);
}

std::string format_spec(const ExperimentSpec& s) {
  auto ints = [](int v) { return std::to_string(v); };
  std::ostringstream os;
  os << "observable = " << observable_name(s.observable) << "\n"
     << "d = " << s.d << "\n"
     << "N = " << join(s.N, ints) << "\n"
     << "n = " << s.n << "\n"
     << "delta = " << real_text(s.delta) << "\n";
  if (!s.chi.empty()) os << "chi = " << join(s.chi, real_text) << "\n";
  os << "k = " << s.k << "\n"
     << "pad = " << real_text(s.pad) << "\n"
     << "seed = " << s.seed << "\n"
     << "replicas = " << s.replicas << "\n"
     << "out = " << s.out << "\n";
  if (!s.x.empty()) os << "x = " << join(s.x, ints) << "\n";
  if (!s.y.empty()) os << "y = " << join(s.y, ints) << "\n";
  os << "domain_radius = " << s.domain_radius << "\n"
     << "first_replica = " << s.first_replica << "\n"
     << "level = " << real_text(s.level) << "\n"
     << "blocks = " << s.blocks << "\n"
     << "threads = " << s.threads << "\n";
  return os.str();
}

namespace {

std::vector<int> point_or_default(const std::vector<int>& p, int d, int axis_one) {
  if (!p.empty()) return p;
  std::vector<int> q(d, 0);
  q[0] = axis_one;
  return q;
}

int domain_radius_for(const ExperimentSpec& s, int N) {
  if (s.domain_radius > 0) return s.domain_radius;
  return static_cast<int>(std::floor(s.pad * N + 1e-9));
}

}  // namespace

void validate(const ExperimentSpec& s) {
  if (s.d < 3) throw SpecError("d must be at least 3");
  if (s.d > kMaxDim) throw SpecError("d exceeds the supported maximum");
  if (s.N.empty()) throw SpecError("N needs at least one radius");
  for (int N : s.N)
    if (N < 1) throw SpecError("every N must be at least 1");
  if (!(s.pad >= 1.0)) throw SpecError("pad must be at least 1");
  if (!(s.delta > 0.0 && s.delta <= 1.0)) throw SpecError("delta must lie in (0, 1]");
  if (s.k < 2) throw SpecError("k must be at least 2");
  if (s.blocks < 1) throw SpecError("blocks must be positive");
  if (s.threads < 0) throw SpecError("threads must be nonnegative");
  if (!std::isfinite(s.level)) throw SpecError("level must be finite");
  const int maxN = *std::max_element(s.N.begin(), s.N.end());
  if (s.domain_radius != 0 && s.domain_radius < maxN)
    throw SpecError("domain_radius must be 0 or at least every N");
  if (s.observable == Observable::Crossing)
    for (int N : s.N)
      if (s.n < 1 || s.n >= N) throw SpecError("crossing needs 1 <= n < N for every N");
  if (s.observable == Observable::MindistCdf)
    for (double c : s.chi_grid())
      if (!(c > 0.0)) throw SpecError("chi values must be positive");
  if (s.observable == Observable::TwoPoint) {
    const auto x = point_or_default(s.x, s.d, 0);
    const auto y = point_or_default(s.y, s.d, 1);
    if (static_cast<int>(x.size()) != s.d || static_cast<int>(y.size()) != s.d)
      throw SpecError("x and y need d coordinates");
    if (x == y) throw SpecError("x and y must differ");
    const int R = domain_radius_for(s, s.N.front());
    for (const auto* p : {&x, &y})
      for (int c : *p)
        if (std::abs(c) >= R) throw SpecError("two-point endpoints must lie inside the domain");
  }
  for (int N : s.N) {
    if (s.domain_radius > 0 && N != maxN) continue;
    const int R = domain_radius_for(s, N);
    double vertices = std::pow(2.0 * R + 1.0, s.d);
    if (vertices * s.d > static_cast<double>(std::numeric_limits<std::int32_t>::max()))
      throw SpecError("domain too large for N = " + std::to_string(N));
  }
}

namespace {

struct PointSpec {
  std::string observable;
  PointKind kind;
  int N;
  int n = 0;
  double chi = std::numeric_limits<double>::quiet_NaN();
};

struct Obs {
  bool accepted = true;
  bool hit = false;
  std::int64_t value = 0;
};

std::vector<PointSpec> layout(const ExperimentSpec& s) {
  std::vector<PointSpec> pts;
  const auto P = PointKind::Proportion;
  switch (s.observable) {
    case Observable::TwoPoint:
      pts.push_back({"two_point", P, s.N.front()});
      pts.push_back({"two_point_negative", P, s.N.front()});
      break;
    case Observable::OneArm:
      for (int N : s.N) {
        pts.push_back({"one_arm", P, N});
        pts.push_back({"one_arm_negative", P, N});
      }
      break;
    case Observable::Crossing:
      for (int N : s.N) pts.push_back({"crossing", P, N, s.n});
      break;
    case Observable::MindistCdf:
      for (int N : s.N) {
        pts.push_back({"mindist_two_clusters", P, N});
        for (double c : s.chi_grid()) pts.push_back({"mindist_cdf", P, N, 0, c});
      }
      break;
    case Observable::Pivotal:
      for (int N : s.N) {
        pts.push_back({"one_arm", P, N});
        pts.push_back({"pivotal_median", PointKind::Median, N});
        pts.push_back({"pivotal_mean", PointKind::Mean, N});
        pts.push_back({"heterochromatic", PointKind::Mean, N});
        pts.push_back({"heterochromatic_same", PointKind::Mean, N});
        pts.push_back({"heterochromatic_opposite", PointKind::Mean, N});
      }
      break;
    case Observable::Heterochromatic:
      for (int N : s.N) {
        pts.push_back({"heterochromatic", PointKind::Mean, N});
        pts.push_back({"heterochromatic_same", PointKind::Mean, N});
        pts.push_back({"heterochromatic_opposite", PointKind::Mean, N});
      }
      break;
  }
  return pts;
}

bool uses_whole_domain(Observable o) {
  return o == Observable::TwoPoint || o == Observable::MindistCdf;
}

struct Domain {
  BoxGeometry box;
  std::unique_ptr<FieldSampler> sampler;
  std::vector<int> radii;  // the N evaluated on this domain
};

struct ReplicaOutput {
  std::vector<Obs> obs;
  std::vector<ReplicaRecord> records;
};

class Runner {
 public:
  explicit Runner(const ExperimentSpec& s) : spec_(s), points_(layout(s)) {
    if (s.domain_radius > 0) {
      BoxGeometry box(s.d, s.domain_radius, 1.0);
      domains_.push_back({box, std::make_unique<SpectralSampler>(box), s.N});
    } else {
      std::vector<int> radii = s.N;
      if (s.observable == Observable::TwoPoint) radii.resize(1);
      for (int N : radii) {
        BoxGeometry box = make_box(s.d, N, s.pad);
        domains_.push_back({box, std::make_unique<SpectralSampler>(box), {N}});
      }
    }
    if (s.observable == Observable::TwoPoint) {
      const BoxGeometry& box = domains_.front().box;
      x_ = box.index(point_or_default(s.x, s.d, 0));
      y_ = box.index(point_or_default(s.y, s.d, 1));
    }
  }

  const std::vector<PointSpec>& points() const { return points_; }
  const BoxGeometry& first_box() const { return domains_.front().box; }
  VertexId x() const { return x_; }
  VertexId y() const { return y_; }

  ReplicaOutput replica(std::uint64_t rep) const {
    ReplicaOutput out;
    out.obs.resize(points_.size());
    for (const auto& dom : domains_) {
      StreamKey key = replica_key(spec_.seed, rep);
      if (spec_.domain_radius == 0) key = key.child(static_cast<std::uint64_t>(dom.radii.front()));
      const FieldConfig field = dom.sampler->sample(key);
      const int maxN = *std::max_element(dom.radii.begin(), dom.radii.end());
      EdgeOptions eo;
      eo.level = spec_.level;
      eo.region = uses_whole_domain(spec_.observable) ? -1 : maxN;
      const OpenEdgeSet edges = open_edges(field, eo);
      const ClusterLabeling lab(edges, field);
      for (int N : dom.radii) evaluate(rep, N, lab, edges, field, out);
    }
    return out;
  }

 private:
  void set(ReplicaOutput& out, const std::string& name, int N, Obs o,
           double chi = std::numeric_limits<double>::quiet_NaN()) const {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto& p = points_[i];
      if (p.observable != name || p.N != N) continue;
      if (std::isnan(chi) != std::isnan(p.chi)) continue;
      if (!std::isnan(chi) && chi != p.chi) continue;
      out.obs[i] = o;
      return;
    }
  }

  void evaluate(std::uint64_t rep, int N, const ClusterLabeling& lab, const OpenEdgeSet& edges,
                const FieldConfig& field, ReplicaOutput& out) const {
    switch (spec_.observable) {
      case Observable::TwoPoint: {
        const VertexId rx = lab.root(x_, Sign::Positive);
        const VertexId nx = lab.root(x_, Sign::Negative);
        set(out, "two_point", N, {true, rx >= 0 && rx == lab.root(y_, Sign::Positive), 0});
        set(out, "two_point_negative", N, {true, nx >= 0 && nx == lab.root(y_, Sign::Negative), 0});
        break;
      }
      case Observable::OneArm:
        set(out, "one_arm", N, {true, one_arm_indicator(lab, N), 0});
        set(out, "one_arm_negative", N, {true, one_arm_indicator_negative(lab, N), 0});
        break;
      case Observable::Crossing:
        set(out, "crossing", N, {true, crossing_indicator(lab, spec_.n, N), 0});
        break;
      case Observable::MindistCdf: {
        const auto macro = macroscopic_clusters(lab, N, spec_.delta);
        set(out, "mindist_two_clusters", N, {true, macro.size() >= 2, 0});
        const auto r = min_distance(lab, edges, field, macro, spec_.k);
        for (double c : spec_.chi_grid())
          set(out, "mindist_cdf", N, {true, r.finite() && r.distance <= c + 1e-12, 0}, c);
        break;
      }
      case Observable::Pivotal: {
        const auto rep_out = pivotal_report(lab, edges, N, spec_.delta, rep);
        const auto& h = rep_out.heterochromatic;
        set(out, "one_arm", N, {true, rep_out.one_arm, 0});
        set(out, "pivotal_median", N, {rep_out.one_arm, false, rep_out.pivotal_count()});
        set(out, "pivotal_mean", N, {rep_out.one_arm, false, rep_out.pivotal_count()});
        set(out, "heterochromatic", N, {true, false, h.total()});
        set(out, "heterochromatic_same", N, {true, false, h.same_sign});
        set(out, "heterochromatic_opposite", N, {true, false, h.opposite_sign});
        out.records.push_back(
            {N, rep, rep_out.one_arm, rep_out.pivotal_count(), h.same_sign, h.opposite_sign});
        break;
      }
      case Observable::Heterochromatic: {
        const auto h = heterochromatic_census(lab, N, spec_.delta);
        set(out, "heterochromatic", N, {true, false, h.total()});
        set(out, "heterochromatic_same", N, {true, false, h.same_sign});
        set(out, "heterochromatic_opposite", N, {true, false, h.opposite_sign});
        break;
      }
    }
  }

  const ExperimentSpec& spec_;
  std::vector<PointSpec> points_;
  std::vector<Domain> domains_;
  VertexId x_ = -1;
  VertexId y_ = -1;
};

void add(Tally& t, PointKind kind, const Obs& o) {
  ++t.trials;
  if (!o.accepted) return;
  ++t.accepted;
  if (o.hit) ++t.hits;
  if (kind != PointKind::Proportion) {
    t.sum += o.value;
    t.sum_sq += o.value * o.value;
    ++t.histogram[o.value];
  }
}

Estimate estimate_of(PointKind kind, const Tally& t) {
  switch (kind) {
    case PointKind::Proportion:
      return proportion(t);
    case PointKind::Mean:
      return mean_value(t);
    case PointKind::Median:
      return median_value(t);
  }
  return {};
}

// Curves fitted against N; the minimal-distance CDF is fitted against chi.
const std::set<std::string>& scaling_curves() {
  static const std::set<std::string> s{"one_arm",        "one_arm_negative", "crossing",
                                       "pivotal_median", "pivotal_mean",     "heterochromatic"};
  return s;
}

}  // namespace

std::vector<FitPoint> curve_points(const RunResult& result, const std::string& name,
                                   int block_left_out) {
  std::string observable = name;
  std::optional<int> only_N;
  if (const auto at = name.find('@'); at != std::string::npos) {
    observable = name.substr(0, at);
    only_N = std::stoi(name.substr(at + 1));
  }
  std::vector<FitPoint> pts;
  for (const auto& p : result.points) {
    if (p.observable != observable) continue;
    if (only_N && p.N != *only_N) continue;
    Estimate e{p.estimate, p.stderr_};
    if (block_left_out >= 0) {
      Tally t;
      for (std::size_t b = 0; b < p.blocks.size(); ++b)
        if (static_cast<int>(b) != block_left_out) t.merge(p.blocks[b]);
      e = estimate_of(p.kind, t);
    }
    const double scale = observable == "mindist_cdf" ? p.chi : static_cast<double>(p.N);
    pts.push_back({scale, e.value, e.stderr_});
  }
  return pts;
}

void finalize(RunResult& r) {
  for (auto& p : r.points) {
    p.total = Tally{};
    for (const auto& b : p.blocks) p.total.merge(b);
    const Estimate e = estimate_of(p.kind, p.total);
    p.estimate = e.value;
    p.stderr_ = e.stderr_;
    p.replicas = static_cast<std::uint64_t>(p.total.trials);
    p.acceptance_rate = p.total.trials > 0 ? static_cast<double>(p.total.accepted) /
                                                 static_cast<double>(p.total.trials)
                                           : 0.0;
  }
  r.fits.clear();
  std::vector<std::string> curves;
  for (const auto& name : scaling_curves())
    if (std::any_of(r.points.begin(), r.points.end(),
                    [&](const PointResult& p) { return p.observable == name; }))
      curves.push_back(name);
  std::set<int> cdf_N;
  for (const auto& p : r.points)
    if (p.observable == "mindist_cdf") cdf_N.insert(p.N);
  for (int N : cdf_N) curves.push_back("mindist_cdf@" + std::to_string(N));

  for (const auto& name : curves) {
    const auto pts = curve_points(r, name);
    if (pts.size() < 3) continue;
    try {
      ExponentFit fit = fit_exponent(pts);
      std::vector<std::vector<FitPoint>> leave_out;
      for (int b = 0; b < r.spec.blocks; ++b) leave_out.push_back(curve_points(r, name, b));
      if (r.spec.blocks >= 2) apply_jackknife(fit, leave_out);
      r.fits[name] = fit;
    } catch (const std::invalid_argument& e) {
      r.notes.push_back("no fit for " + name + ": " + e.what());
    }
  }
}

RunResult run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  result.spec = spec;
  std::unique_ptr<const Runner> runner_ptr;
  try {
    runner_ptr = std::make_unique<const Runner>(spec);
  } catch (const std::bad_alloc&) {
    result.partial = true;
    result.error = "out of memory while preparing the samplers";
  }
  for (const auto& ps : layout(spec)) {
    PointResult p;
    p.observable = ps.observable;
    p.kind = ps.kind;
    p.d = spec.d;
    p.N = ps.N;
    p.n = ps.n;
    p.delta = spec.delta;
    p.chi = ps.chi;
    p.k = spec.observable == Observable::MindistCdf ? spec.k : 0;
    p.seed = spec.seed;
    p.blocks.resize(static_cast<std::size_t>(spec.blocks));
    result.points.push_back(std::move(p));
  }
  if (!runner_ptr) {
    finalize(result);
    return result;
  }
  const Runner& runner = *runner_ptr;
  if (spec.observable == Observable::TwoPoint) {
    const GreenOperator g = killed_green(runner.first_box(), {});
    result.reference = arcsin_two_point(g, runner.x(), runner.y());
  }
  if (spec.d == 6) result.notes.push_back("d = 6 carries logarithmic corrections");
  if (spec.observable == Observable::Pivotal || spec.observable == Observable::Heterochromatic)
    result.notes.push_back(
        "heterochromatic counts are a proxy for pivotal loops, up to an unknown constant");

  const std::uint64_t total = spec.replicas;
  std::vector<std::optional<ReplicaOutput>> outputs(total);
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed) {
      const std::uint64_t i = next++;
      if (i >= total) return;
      try {
        outputs[i] = runner.replica(spec.first_replica + i);
      } catch (const std::bad_alloc&) {
        std::lock_guard lock(error_mutex);
        failed = true;
        result.error = "out of memory at replica " + std::to_string(spec.first_replica + i);
      } catch (const SolverError& e) {
        std::lock_guard lock(error_mutex);
        failed = true;
        result.error = e.what();
      }
    }
  };
  int threads = spec.threads > 0 ? spec.threads
                                 : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(total, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Reduce in replica order; stop at the first gap so a partial run is a prefix.
  for (std::uint64_t i = 0; i < total; ++i) {
    if (!outputs[i]) {
      result.partial = true;
      break;
    }
    const std::uint64_t rep = spec.first_replica + i;
    const auto block = static_cast<std::size_t>(rep % static_cast<std::uint64_t>(spec.blocks));
    for (std::size_t j = 0; j < result.points.size(); ++j)
      add(result.points[j].blocks[block], result.points[j].kind, outputs[i]->obs[j]);
    for (const auto& rec : outputs[i]->records) result.records.push_back(rec);
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const ReplicaRecord& a, const ReplicaRecord& b) {
              return std::tie(a.N, a.replica) < std::tie(b.N, b.replica);
            });
  finalize(result);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

RunResult pool_results(const std::vector<RunResult>& runs) {
  if (runs.empty()) throw std::invalid_argument("nothing to pool");
  RunResult out = runs.front();
  out.records.clear();
  out.wall_seconds = 0.0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const auto& r = runs[i];
    if (r.points.size() != out.points.size())
      throw std::invalid_argument("pooled runs have different parameter points");
    for (std::size_t j = 0; j < r.points.size(); ++j) {
      const auto& a = out.points[j];
      const auto& b = r.points[j];
      if (a.observable != b.observable || a.N != b.N || a.blocks.size() != b.blocks.size())
        throw std::invalid_argument("pooled runs have different parameter points");
      for (std::size_t k = 0; k < b.blocks.size(); ++k) out.points[j].blocks[k].merge(b.blocks[k]);
    }
    out.partial = out.partial || r.partial;
  }
  std::uint64_t replicas = 0;
  std::uint64_t first = std::numeric_limits<std::uint64_t>::max();
  for (const auto& r : runs) {
    replicas += r.spec.replicas;
    first = std::min(first, r.spec.first_replica);
    out.wall_seconds += r.wall_seconds;
    out.records.insert(out.records.end(), r.records.begin(), r.records.end());
  }
  out.spec.replicas = replicas;
  out.spec.first_replica = first;
  std::sort(out.records.begin(), out.records.end(),
            [](const ReplicaRecord& a, const ReplicaRecord& b) {
              return std::tie(a.N, a.replica) < std::tie(b.N, b.replica);
            });
  finalize(out);
  return out;
}

}  // namespace gffperc
