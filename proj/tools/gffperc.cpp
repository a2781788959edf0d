// Command-line front end for the simulator.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gffperc/experiments.hpp"
#include "gffperc/gff.hpp"
#include "gffperc/lattice.hpp"
#include "gffperc/potential.hpp"

namespace fs = std::filesystem;
using namespace gffperc;

namespace {

constexpr int kExitSpec = 2;
constexpr int kExitPartial = 3;

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicas;
  std::optional<std::string> out;
  std::optional<int> threads;
};

void add_common(CLI::App* app, CommonArgs& a) {
  app->add_option("--config", a.config, "flat key = value experiment file")->required();
  app->add_option("--seed", a.seed, "master seed (overrides GFFPERC_SEED and the config)");
  app->add_option("--replicas", a.replicas, "number of replicas");
  app->add_option("--out", a.out, "output directory");
  app->add_option("--threads", a.threads, "worker threads, 0 for all cores");
}

ExperimentSpec load(const CommonArgs& a, std::optional<Observable> observable) {
  ExperimentSpec spec = load_spec(a.config);
  if (const char* env = std::getenv("GFFPERC_SEED")) apply_setting(spec, "seed", env);
  if (a.seed) spec.seed = *a.seed;
  if (a.replicas) spec.replicas = *a.replicas;
  if (a.out) spec.out = *a.out;
  if (a.threads) spec.threads = *a.threads;
  if (observable) spec.observable = *observable;
  validate(spec);
  return spec;
}

std::string point_text(const BoxGeometry& box, VertexId v) {
  const Point p = box.point(v);
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? " " : "") + std::to_string(p[i]);
  return s;
}

VertexId vertex_or(const BoxGeometry& box, const std::vector<int>& p, int axis_one) {
  if (!p.empty()) return box.index(p);
  Point q(box.dim(), 0);
  q[0] = axis_one;
  return box.index(q);
}

int run_greens(const ExperimentSpec& spec) {
  const BoxGeometry box = make_box(spec.d, spec.N.front(), spec.pad);
  const GreenOperator g = killed_green(box, {});
  fs::create_directories(spec.out);
  const fs::path path = fs::path(spec.out) / "greens.csv";
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "x,y,G_D,hitting,arcsin_pred\n";
  const VertexId x = vertex_or(box, spec.x, 0);
  std::vector<VertexId> targets;
  if (!spec.y.empty()) targets.push_back(box.index(spec.y));
  Point q = box.point(x);
  for (int t = 0; t < box.domain_radius(); ++t) {
    q[0] = t;
    if (box.contains(q) && !box.on_shell(box.index(q))) targets.push_back(box.index(q));
  }
  os.precision(12);
  for (VertexId y : targets) {
    os << point_text(box, x) << ',' << point_text(box, y) << ',' << g(x, y) << ','
       << hitting_probability(g, x, y) << ',';
    if (x != y)
      os << arcsin_two_point(g, x, y);
    else
      os << 1.0;
    os << "\n";
  }
  std::cout << path.string() << "\n";
  return 0;
}

int run_sample(const ExperimentSpec& spec) {
  const BoxGeometry box = make_box(spec.d, spec.N.front(), spec.pad);
  const auto sampler = make_sampler(box, {});
  std::vector<FieldConfig> fields;
  for (std::uint64_t r = 0; r < spec.replicas; ++r)
    fields.push_back(sampler->sample(spec.seed, spec.first_replica + r));
  fs::create_directories(spec.out);
  const fs::path dump = fs::path(spec.out) / "fields.bin";
  write_field_dump(dump, fields);
  std::cout << dump.string() << "\n";
  if (fields.size() >= 2) {
    const VertexId x = vertex_or(box, spec.x, 0);
    const VertexId y = vertex_or(box, spec.y, 1);
    const GreenOperator g = killed_green(box, {});
    const auto rows = covariance_diagnostic(fields, {{x, x}, {x, y}, {y, y}}, g);
    const fs::path path = fs::path(spec.out) / "covariance.csv";
    std::ofstream os(path);
    os << "x,y,empirical,exact,z\n";
    os.precision(12);
    for (const auto& r : rows)
      os << point_text(box, r.x) << ',' << point_text(box, r.y) << ',' << r.empirical << ','
         << r.exact << ',' << r.z_score << "\n";
    std::cout << path.string() << "\n";
  }
  return 0;
}

int run_observable(const ExperimentSpec& spec) {
  const RunResult r = run_experiment(spec);
  for (const auto& p : emit_results(r, spec.out)) std::cout << p.string() << "\n";
  write_csv(std::cout, r);
  for (const auto& [name, f] : r.fits)
    std::cerr << "fit " << name << ": slope " << f.slope << " [" << f.ci_low << ", " << f.ci_high
              << "]\n";
  if (r.partial) {
    std::cerr << "partial result: " << r.error << "\n";
    return kExitPartial;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian free field percolation on the metric graph of Z^d"};
  app.require_subcommand(1);
  CommonArgs args;
  struct Sub {
    const char* name;
    const char* help;
    std::optional<Observable> observable;
  };
  const Sub subs[] = {
      {"greens", "killed Green's function, hitting and two-point predictions", std::nullopt},
      {"sample", "draw fields and dump them", std::nullopt},
      {"two-point", "two-point connection probability", Observable::TwoPoint},
      {"one-arm", "one-arm probabilities", Observable::OneArm},
      {"crossing", "crossing probabilities", Observable::Crossing},
      {"mindist", "distribution of the minimal distance", Observable::MindistCdf},
      {"pivotal", "pivotal-edge and heterochromatic census", Observable::Pivotal},
      {"heterochromatic", "heterochromatic edge census", Observable::Heterochromatic},
      {"run", "observable taken from the config", std::nullopt},
  };
  std::vector<CLI::App*> apps;
  for (const auto& s : subs) {
    apps.push_back(app.add_subcommand(s.name, s.help));
    add_common(apps.back(), args);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < apps.size(); ++i) {
      if (!apps[i]->parsed()) continue;
      const std::string name = subs[i].name;
      const ExperimentSpec spec = load(args, subs[i].observable);
      if (name == "greens") return run_greens(spec);
      if (name == "sample") return run_sample(spec);
      return run_observable(spec);
    }
  } catch (const SpecError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return kExitSpec;
  } catch (const std::invalid_argument& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return kExitSpec;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
