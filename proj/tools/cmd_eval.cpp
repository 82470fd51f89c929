#include <fstream>
#include <iostream>
#include <memory>

#include "cli_common.hpp"
#include "commands.hpp"
#include "pgo/errors.hpp"

namespace pgocli {
namespace {

struct Opts {
  std::string estimate;
  std::string gt;
  std::string classification;
  std::string out;
  int delta = 1;
  std::string config;
};

// Reads label + classification columns of a solve-produced
// classification.csv; unlabeled rows are skipped.
pgo::ClassificationMetrics read_classification(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument(path + ": empty file");
  const auto header = split(line, ',');
  int label_col = -1, cls_col = -1;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == "label") label_col = static_cast<int>(k);
    if (header[k] == "classification") cls_col = static_cast<int>(k);
  }
  if (label_col < 0 || cls_col < 0)
    throw std::invalid_argument(path +
                                ": need 'label' and 'classification' columns");

  std::vector<pgo::TruthLabel> labels;
  std::vector<pgo::Classification> cls;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    // split() drops empty cells, so index raw pieces here instead.
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto end = line.find(',', start);
      cells.push_back(
          line.substr(start, end == std::string::npos ? end : end - start));
      if (end == std::string::npos) break;
      start = end + 1;
    }
    if (static_cast<std::size_t>(std::max(label_col, cls_col)) >= cells.size())
      throw std::invalid_argument(path + ": short row at line " +
                                  std::to_string(line_no));
    const std::string& label = cells[static_cast<std::size_t>(label_col)];
    if (label.empty()) continue;
    if (label == "true_loop")
      labels.push_back(pgo::TruthLabel::kTrueLoop);
    else if (label == "false_loop")
      labels.push_back(pgo::TruthLabel::kFalseLoop);
    else
      throw std::invalid_argument(path + ": unknown label '" + label + "'");
    const std::string& c = cells[static_cast<std::size_t>(cls_col)];
    if (c == "inlier")
      cls.push_back(pgo::Classification::kInlier);
    else if (c == "ambiguous")
      cls.push_back(pgo::Classification::kAmbiguous);
    else if (c == "outlier")
      cls.push_back(pgo::Classification::kOutlier);
    else
      throw std::invalid_argument(path + ": unknown classification '" + c +
                                  "'");
  }
  return pgo::precision_recall(labels, cls);
}

}  // namespace

Command make_eval(CLI::App& app) {
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand(
      "eval", "Compare an estimate against ground truth (ATE, RPE, and "
              "optionally precision/recall)");
  sub->add_option("estimate", o->estimate, "estimate g2o file")->required();
  sub->add_option("gt", o->gt, "ground-truth g2o file or reference set name")
      ->required();
  sub->add_option("--classification", o->classification,
                  "classification.csv from solve for precision/recall");
  sub->add_option("--delta", o->delta, "RPE step distance");
  sub->add_option("--out", o->out, "write metrics.csv here");
  sub->add_option("--config", o->config,
                  "key=value config file; explicit flags win");

  auto run = [o]() -> int {
    Dataset est = resolve_dataset(o->estimate);
    Dataset gt = resolve_dataset(o->gt);
    const pgo::TrajectoryMetrics tm =
        metrics_any(est.graph, gt.graph, o->delta);

    std::string precision, recall;
    if (!o->classification.empty()) {
      const auto cm = read_classification(o->classification);
      precision = fmt(cm.precision);
      recall = fmt(cm.recall);
    }

    std::cout << "ate_m=" << fmt(tm.ate_rmse)
              << " rpe_t_m=" << fmt(tm.rpe_trans_rmse)
              << " rpe_r_rad=" << fmt(tm.rpe_rot_rmse);
    if (!precision.empty())
      std::cout << " precision=" << precision << " recall=" << recall;
    std::cout << "\n";

    if (!o->out.empty()) {
      CsvWriter csv(o->out,
                    {"ate_m", "rpe_t_m", "rpe_r_rad", "precision", "recall"});
      csv.row({fmt(tm.ate_rmse), fmt(tm.rpe_trans_rmse), fmt(tm.rpe_rot_rmse),
               precision, recall});
    }
    return kExitOk;
  };
  return {sub, run};
}

}  // namespace pgocli
