#include <iostream>
#include <memory>
#include <variant>

#include "cli_common.hpp"
#include "commands.hpp"
#include "pgo/dataset_tools.hpp"

namespace pgocli {
namespace {

struct Opts {
  std::string input;
  std::string out;
  double rate = 0.0;
  std::uint64_t seed = 0;
  std::string basis = "of-true";
  int min_gap = 50;
  double min_distance = -1.0;
  std::string info_policy = "copy";
  std::string config;  // consumed before parsing; kept for --help
};

struct LoopCounts {
  int loops = 0;
  int true_loops = 0;
  int false_loops = 0;
};

LoopCounts count_loops(const pgo::AnyGraph& g) {
  LoopCounts c;
  std::visit(
      [&](const auto& graph) {
        for (const auto& f : graph.factors) {
          if (f.kind != pgo::FactorKind::kLoop) continue;
          ++c.loops;
          if (f.truth_label == pgo::TruthLabel::kTrueLoop) ++c.true_loops;
          if (f.truth_label == pgo::TruthLabel::kFalseLoop) ++c.false_loops;
        }
      },
      g);
  return c;
}

}  // namespace

Command make_corrupt(CLI::App& app) {
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand(
      "corrupt", "Inject false loop closures into a pose graph");
  sub->add_option("input", o->input, "g2o file or reference set name")
      ->required();
  sub->add_option("--rate", o->rate, "outlier rate")->required();
  sub->add_option("--seed", o->seed, "rng seed");
  sub->add_option("--basis", o->basis, "rate basis: of-true | of-total");
  sub->add_option("--min-gap", o->min_gap,
                  "minimum index separation of sampled pairs");
  sub->add_option("--min-distance", o->min_distance,
                  "minimum pose distance; negative = 5x mean odometry step");
  sub->add_option("--info-policy", o->info_policy,
                  "false-loop information: copy | identity");
  sub->add_option("--out", o->out, "output g2o path")->required();
  sub->add_option("--config", o->config,
                  "key=value config file; explicit flags win");

  auto run = [o]() -> int {
    Dataset ds = resolve_dataset(o->input);

    pgo::CorruptionConfig cfg;
    cfg.outlier_rate = o->rate;
    cfg.seed = o->seed;
    cfg.min_index_gap = o->min_gap;
    cfg.min_gt_distance = o->min_distance;
    if (o->basis == "of-true")
      cfg.rate_basis = pgo::RateBasis::kOfTrue;
    else if (o->basis == "of-total")
      cfg.rate_basis = pgo::RateBasis::kOfTotal;
    else
      throw std::invalid_argument("unknown basis '" + o->basis +
                                  "' (expected of-true | of-total)");
    if (o->info_policy == "copy")
      cfg.loop_info = pgo::LoopInfoPolicy::kCopyRandomLoop;
    else if (o->info_policy == "identity")
      cfg.loop_info = pgo::LoopInfoPolicy::kIdentity;
    else
      throw std::invalid_argument("unknown info policy '" + o->info_policy +
                                  "' (expected copy | identity)");

    const pgo::AnyGraph corrupted = pgo::inject_false_loops(ds.graph, cfg);
    pgo::save_g2o_file(o->out, corrupted);
    write_labels_csv(labels_path_for(o->out), corrupted);

    const LoopCounts c = count_loops(corrupted);
    std::cout << "wrote " << o->out << ": loops=" << c.loops
              << " true=" << c.true_loops << " false=" << c.false_loops
              << "\n";
    return kExitOk;
  };
  return {sub, run};
}

}  // namespace pgocli
