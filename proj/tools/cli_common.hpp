// Shared plumbing for the pgo command-line tool: exit codes, deterministic
// number formatting, schedule strings, key=value config files with a content
// digest, dataset resolution (file path or built-in reference set), CSV
// output, and the solve pipeline shared by `solve` and `bench`.
#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "pgo/dataset_tools.hpp"
#include "pgo/gnc_engine.hpp"
#include "pgo/graph.hpp"
#include "pgo/metrics.hpp"

namespace pgocli {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitParse = 2;
constexpr int kExitCorrupt = 3;
constexpr int kExitDiverged = 4;

// "%.9g": compact, deterministic, round-trips float32-scale precision.
std::string fmt(double v);
std::string fmt_runtime(double seconds);  // "%.6f"

std::vector<std::string> split(const std::string& text, char sep);
std::vector<double> parse_doubles(const std::string& text);
std::vector<std::uint64_t> parse_u64s(const std::string& text);

// --------------------------------------------------------------------------
// Schedules. `none` is a plain robustless solve handled at the CLI level;
// the other three map onto ScheduleKind.

struct ScheduleSpec {
  enum class Kind { kAdaptive, kFixedAlpha, kBaseline, kNone };
  Kind kind = Kind::kAdaptive;
  double alpha = 0.5;

  std::string label() const;
};

// Accepts adaptive | fixed-alpha=A | baseline | none. Throws
// std::invalid_argument on anything else or alpha outside [0, 1].
ScheduleSpec parse_schedule(const std::string& text);

// --------------------------------------------------------------------------
// Config files: flat `key = value` lines, # comments, no sections. Keys are
// long option names without the leading dashes; flags given on the command
// line win over file values.

std::vector<std::pair<std::string, std::string>> load_config_file(
    const std::string& path);

// Rewrites raw argv so config entries become --key=value tokens inserted
// right after the subcommand, ahead of user flags (options take the last
// occurrence, so explicit flags override the file).
std::vector<std::string> expand_config_args(int argc, const char* const* argv);

std::uint64_t fnv1a64(const std::string& text);
std::string digest_hex(const std::string& text);

// --------------------------------------------------------------------------
// Datasets: an argument is either a g2o file path or a built-in reference
// set name (m3500, sphere2500, csail, intel).

struct Dataset {
  std::string name;
  pgo::AnyGraph graph;  // poses double as ground truth for metrics
};

Dataset resolve_dataset(const std::string& arg);

// Sibling label report next to a written g2o: <stem>.labels.csv with one row
// per labeled loop factor.
std::string labels_path_for(const std::string& g2o_path);
void write_labels_csv(const std::string& path, const pgo::AnyGraph& g);

// --------------------------------------------------------------------------

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

// --------------------------------------------------------------------------
// One schedule run on one graph: prior + dead-reckoned initial guess, then
// run_gnc (or a plain solve for `none`), timed.

struct RunBundle {
  pgo::AnyGraph estimate;  // input factors with solved poses
  std::vector<int> loop_indices;
  std::vector<pgo::Classification> classification;
  std::vector<double> final_m;
  std::vector<pgo::GncRound> history;
  double runtime_s = 0.0;
  int inner_iters = 0;
  int outer_rounds = 0;
  bool converged = false;
  bool diverged = false;
};

RunBundle run_any(const pgo::AnyGraph& graph, const ScheduleSpec& schedule,
                  const pgo::GncConfig& base_config);

// ATE/RPE of the bundle estimate against ground-truth poses (dimension must
// match; throws std::invalid_argument otherwise).
pgo::TrajectoryMetrics metrics_any(const pgo::AnyGraph& estimate,
                                   const pgo::AnyGraph& gt, int delta);

// Precision/recall over the bundle's labeled loops; false when none carry
// labels and `out` is untouched.
bool labels_metrics(const pgo::AnyGraph& graph, const RunBundle& bundle,
                    pgo::ClassificationMetrics* out);

int thread_cap(int requested);

}  // namespace pgocli
