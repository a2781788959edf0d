#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gffperc/estimators.hpp"

namespace gffperc {

/// Invalid experiment configuration.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Observable { TwoPoint, OneArm, Crossing, MindistCdf, Pivotal, Heterochromatic };

std::string observable_name(Observable o);
Observable parse_observable(const std::string& name);

struct ExperimentSpec {
  Observable observable = Observable::OneArm;
  int d = 3;
  std::vector<int> N{8};
  /// Inner radius of the crossing event.
  int n = 1;
  double delta = 0.5;
  /// Distance thresholds of the minimal-distance CDF; empty means d 2^-j, j = 1..5.
  std::vector<double> chi;
  /// Sub-edge resolution of distances.
  int k = 8;
  double pad = 2.0;
  std::uint64_t seed = 1;
  std::uint64_t replicas = 1000;
  std::string out = "results";
  /// Two-point endpoints; empty means the origin and e_1.
  std::vector<int> x;
  std::vector<int> y;
  /// When positive, every N is evaluated on shared fields over B(domain_radius).
  int domain_radius = 0;
  /// Replica indices run from first_replica to first_replica + replicas - 1.
  std::uint64_t first_replica = 0;
  double level = 0.0;
  /// Replica blocks for the jackknife; replica r belongs to block r mod blocks.
  int blocks = 10;
  /// Worker threads; 0 uses the hardware concurrency.
  int threads = 0;

  std::vector<double> chi_grid() const;
  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// Reads flat `key = value` lines; `#` starts a comment, lists are comma
/// separated.
ExperimentSpec parse_spec(std::istream& in);
ExperimentSpec load_spec(const std::filesystem::path& path);
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);
std::string format_spec(const ExperimentSpec& spec);
/// Throws SpecError when the spec violates a precondition.
void validate(const ExperimentSpec& spec);

enum class PointKind { Proportion, Mean, Median };

/// One row of the output: an observable at one parameter point.
struct PointResult {
  std::string observable;
  PointKind kind = PointKind::Proportion;
  int d = 3;
  int N = 0;
  int n = 0;
  double delta = 0.0;
  double chi = 0.0;  // NaN when not applicable
  int k = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t replicas = 0;
  double acceptance_rate = 1.0;
  std::uint64_t seed = 0;
  /// Totals and per-block tallies; not part of the CSV.
  Tally total;
  std::vector<Tally> blocks;
};

struct ReplicaRecord {
  int N = 0;
  std::uint64_t replica = 0;
  bool one_arm = false;
  std::int64_t pivotal = 0;
  std::int64_t same_sign = 0;
  std::int64_t opposite_sign = 0;
  friend bool operator==(const ReplicaRecord&, const ReplicaRecord&) = default;
};

struct RunResult {
  ExperimentSpec spec;
  std::vector<PointResult> points;
  std::map<std::string, ExponentFit> fits;
  std::vector<ReplicaRecord> records;
  /// Exact prediction for the two-point observable, when computed.
  std::optional<double> reference;
  bool partial = false;
  std::string error;
  double wall_seconds = 0.0;
  std::vector<std::string> notes;
};

RunResult run_experiment(const ExperimentSpec& spec);

/// Recomputes estimates and fits from tallies.
void finalize(RunResult& result);
/// Merges runs of one spec over disjoint replica ranges.
RunResult pool_results(const std::vector<RunResult>& runs);

/// Points of a curve, `observable` against N (or against chi for the
/// minimal-distance CDF at one N).
std::vector<FitPoint> curve_points(const RunResult& result, const std::string& observable,
                                   int block_left_out = -1);

inline constexpr const char* kCsvHeader =
    "observable,d,N,n,delta,chi,k,estimate,stderr,replicas,acceptance_rate,seed";

void write_csv(std::ostream& os, const RunResult& result);
std::vector<PointResult> read_csv(std::istream& is);
void write_records_csv(std::ostream& os, const RunResult& result);
std::string summary_json(const RunResult& result);
RunResult parse_summary_json(const std::string& text);
/// Writes results.csv, summary.json, one .dat table per curve and, for the
/// pivotal observable, replicas.csv into dir.
std::vector<std::filesystem::path> emit_results(const RunResult& result,
                                                const std::filesystem::path& dir);

}  // namespace gffperc
