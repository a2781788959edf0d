#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "gffperc/experiments.hpp"
#include "json.hpp"

namespace gffperc {

using nlohmann::json;

namespace {

std::string real_text(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

json real_json(double v) { return std::isnan(v) ? json(nullptr) : json(v); }
double real_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::string kind_name(PointKind k) {
  switch (k) {
    case PointKind::Proportion:
      return "proportion";
    case PointKind::Mean:
      return "mean";
    case PointKind::Median:
      return "median";
  }
  return "proportion";
}

PointKind kind_from(const std::string& s) {
  if (s == "mean") return PointKind::Mean;
  if (s == "median") return PointKind::Median;
  return PointKind::Proportion;
}

json tally_json(const Tally& t) {
  json h = json::array();
  for (const auto& [v, c] : t.histogram) h.push_back({v, c});
  return {{"trials", t.trials}, {"accepted", t.accepted}, {"hits", t.hits},
          {"sum", t.sum},       {"sum_sq", t.sum_sq},     {"histogram", h}};
}

Tally tally_from(const json& j) {
  Tally t;
  t.trials = j.at("trials").get<std::int64_t>();
  t.accepted = j.at("accepted").get<std::int64_t>();
  t.hits = j.at("hits").get<std::int64_t>();
  t.sum = j.at("sum").get<std::int64_t>();
  t.sum_sq = j.at("sum_sq").get<std::int64_t>();
  for (const auto& e : j.at("histogram")) t.histogram[e[0].get<std::int64_t>()] = e[1].get<std::int64_t>();
  return t;
}

}  // namespace

void write_csv(std::ostream& os, const RunResult& r) {
  os << kCsvHeader << "\n";
  for (const auto& p : r.points) {
    os << p.observable << ',' << p.d << ',' << p.N << ',' << p.n << ',' << real_text(p.delta) << ','
       << real_text(p.chi) << ',' << p.k << ',' << real_text(p.estimate) << ','
       << real_text(p.stderr_) << ',' << p.replicas << ',' << real_text(p.acceptance_rate) << ','
       << p.seed << "\n";
  }
}

std::vector<PointResult> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw std::runtime_error("results CSV has an unexpected header");
  std::vector<PointResult> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 12) throw std::runtime_error("results CSV row has " + std::to_string(c.size()) + " fields");
    PointResult p;
    p.observable = c[0];
    p.d = std::stoi(c[1]);
    p.N = std::stoi(c[2]);
    p.n = std::stoi(c[3]);
    p.delta = parse_real(c[4]);
    p.chi = parse_real(c[5]);
    p.k = std::stoi(c[6]);
    p.estimate = parse_real(c[7]);
    p.stderr_ = parse_real(c[8]);
    p.replicas = std::stoull(c[9]);
    p.acceptance_rate = parse_real(c[10]);
    p.seed = std::stoull(c[11]);
    out.push_back(std::move(p));
  }
  return out;
}

void write_records_csv(std::ostream& os, const RunResult& r) {
  os << "N,replica,one_arm,pivotal,heterochromatic_same,heterochromatic_opposite\n";
  for (const auto& rec : r.records)
    os << rec.N << ',' << rec.replica << ',' << (rec.one_arm ? 1 : 0) << ',' << rec.pivotal << ','
       << rec.same_sign << ',' << rec.opposite_sign << "\n";
  // Conditional quartiles of the pivotal count, one summary row per N.
  std::map<int, std::map<std::int64_t, std::int64_t>> hist;
  for (const auto& rec : r.records)
    if (rec.one_arm) ++hist[rec.N][rec.pivotal];
  for (const auto& [N, h] : hist)
    os << "# N=" << N << " q25=" << quantile(h, 0.25) << " median=" << quantile(h, 0.5)
       << " q75=" << quantile(h, 0.75) << "\n";
}

std::string summary_json(const RunResult& r) {
  const auto& s = r.spec;
  json spec = {{"observable", observable_name(s.observable)},
               {"d", s.d},
               {"N", s.N},
               {"n", s.n},
               {"delta", s.delta},
               {"chi", s.chi},
               {"k", s.k},
               {"pad", s.pad},
               {"seed", s.seed},
               {"replicas", s.replicas},
               {"out", s.out},
               {"x", s.x},
               {"y", s.y},
               {"domain_radius", s.domain_radius},
               {"first_replica", s.first_replica},
               {"level", s.level},
               {"blocks", s.blocks},
               {"threads", s.threads}};
  json points = json::array();
  for (const auto& p : r.points) {
    json blocks = json::array();
    for (const auto& b : p.blocks) blocks.push_back(tally_json(b));
    points.push_back({{"observable", p.observable},
                      {"kind", kind_name(p.kind)},
                      {"d", p.d},
                      {"N", p.N},
                      {"n", p.n},
                      {"delta", real_json(p.delta)},
                      {"chi", real_json(p.chi)},
                      {"k", p.k},
                      {"estimate", real_json(p.estimate)},
                      {"stderr", real_json(p.stderr_)},
                      {"replicas", p.replicas},
                      {"acceptance_rate", real_json(p.acceptance_rate)},
                      {"seed", p.seed},
                      {"blocks", blocks}});
  }
  json fits = json::object();
  for (const auto& [name, f] : r.fits)
    fits[name] = {{"slope", f.slope},       {"intercept", f.intercept},
                  {"slope_se", f.slope_se}, {"ci_low", f.ci_low},
                  {"ci_high", f.ci_high},   {"jackknife", f.jackknife},
                  {"points_used", f.points_used}, {"warnings", f.warnings}};
  json records = json::array();
  for (const auto& rec : r.records)
    records.push_back({rec.N, rec.replica, rec.one_arm, rec.pivotal, rec.same_sign, rec.opposite_sign});
  json j = {{"spec", spec},
            {"points", points},
            {"fits", fits},
            {"records", records},
            {"reference", r.reference ? json(*r.reference) : json(nullptr)},
            {"partial", r.partial},
            {"error", r.error},
            {"wall_seconds", r.wall_seconds},
            {"notes", r.notes}};
  return j.dump(2);
}

RunResult parse_summary_json(const std::string& text) {
  const json j = json::parse(text);
  RunResult r;
  const json& s = j.at("spec");
  r.spec.observable = parse_observable(s.at("observable").get<std::string>());
  r.spec.d = s.at("d").get<int>();
  r.spec.N = s.at("N").get<std::vector<int>>();
  r.spec.n = s.at("n").get<int>();
  r.spec.delta = s.at("delta").get<double>();
  r.spec.chi = s.at("chi").get<std::vector<double>>();
  r.spec.k = s.at("k").get<int>();
  r.spec.pad = s.at("pad").get<double>();
  r.spec.seed = s.at("seed").get<std::uint64_t>();
  r.spec.replicas = s.at("replicas").get<std::uint64_t>();
  r.spec.out = s.at("out").get<std::string>();
  r.spec.x = s.at("x").get<std::vector<int>>();
  r.spec.y = s.at("y").get<std::vector<int>>();
  r.spec.domain_radius = s.at("domain_radius").get<int>();
  r.spec.first_replica = s.at("first_replica").get<std::uint64_t>();
  r.spec.level = s.at("level").get<double>();
  r.spec.blocks = s.at("blocks").get<int>();
  r.spec.threads = s.at("threads").get<int>();
  for (const auto& p : j.at("points")) {
    PointResult q;
    q.observable = p.at("observable").get<std::string>();
    q.kind = kind_from(p.at("kind").get<std::string>());
    q.d = p.at("d").get<int>();
    q.N = p.at("N").get<int>();
    q.n = p.at("n").get<int>();
    q.delta = real_from(p.at("delta"));
    q.chi = real_from(p.at("chi"));
    q.k = p.at("k").get<int>();
    q.estimate = real_from(p.at("estimate"));
    q.stderr_ = real_from(p.at("stderr"));
    q.replicas = p.at("replicas").get<std::uint64_t>();
    q.acceptance_rate = real_from(p.at("acceptance_rate"));
    q.seed = p.at("seed").get<std::uint64_t>();
    for (const auto& b : p.at("blocks")) {
      q.blocks.push_back(tally_from(b));
      q.total.merge(q.blocks.back());
    }
    r.points.push_back(std::move(q));
  }
  for (const auto& [name, f] : j.at("fits").items()) {
    ExponentFit fit;
    fit.slope = f.at("slope").get<double>();
    fit.intercept = f.at("intercept").get<double>();
    fit.slope_se = f.at("slope_se").get<double>();
    fit.ci_low = f.at("ci_low").get<double>();
    fit.ci_high = f.at("ci_high").get<double>();
    fit.jackknife = f.at("jackknife").get<bool>();
    fit.points_used = f.at("points_used").get<std::size_t>();
    fit.warnings = f.at("warnings").get<std::vector<std::string>>();
    r.fits[name] = fit;
  }
  for (const auto& e : j.at("records"))
    r.records.push_back({e[0].get<int>(), e[1].get<std::uint64_t>(), e[2].get<bool>(),
                         e[3].get<std::int64_t>(), e[4].get<std::int64_t>(), e[5].get<std::int64_t>()});
  if (!j.at("reference").is_null()) r.reference = j.at("reference").get<double>();
  r.partial = j.at("partial").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

std::vector<std::filesystem::path> emit_results(const RunResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::string& name) {
    const auto path = dir / name;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
    return os;
  };
  {
    auto os = open("results.csv");
    write_csv(os, r);
  }
  {
    auto os = open("summary.json");
    os << summary_json(r) << "\n";
  }
  std::map<std::string, std::vector<const PointResult*>> curves;
  for (const auto& p : r.points) {
    std::string name = p.observable;
    if (p.observable == "mindist_cdf") name += "_N" + std::to_string(p.N);
    curves[name].push_back(&p);
  }
  for (const auto& [name, pts] : curves) {
    auto os = open(name + ".dat");
    const bool by_chi = pts.front()->observable == "mindist_cdf";
    os << "# " << (by_chi ? "chi" : "N") << " estimate stderr\n";
    for (const auto* p : pts)
      os << (by_chi ? real_text(p->chi) : std::to_string(p->N)) << ' ' << real_text(p->estimate)
         << ' ' << real_text(p->stderr_) << "\n";
  }
  if (!r.records.empty()) {
    auto os = open("replicas.csv");
    write_records_csv(os, r);
  }
  return written;
}

}  // namespace gffperc
