#include "cli_common.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <thread>
#include <variant>

#include "pgo/errors.hpp"
#include "pgo/nlls_solver.hpp"

namespace pgocli {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

}  // namespace

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fmt_runtime(double seconds) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", seconds);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find(sep, start);
    const auto piece =
        trim(text.substr(start, end == std::string::npos ? end : end - start));
    if (!piece.empty()) out.push_back(piece);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& piece : split(text, ',')) out.push_back(to_double(piece));
  return out;
}

std::vector<std::uint64_t> parse_u64s(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& piece : split(text, ',')) {
    std::size_t used = 0;
    out.push_back(std::stoull(piece, &used));
    if (used != piece.size())
      throw std::invalid_argument("bad integer '" + piece + "'");
  }
  return out;
}

std::string ScheduleSpec::label() const {
  switch (kind) {
    case Kind::kAdaptive: return "adaptive";
    case Kind::kBaseline: return "baseline";
    case Kind::kNone: return "none";
    case Kind::kFixedAlpha: return "fixed-alpha=" + fmt(alpha);
  }
  return "?";
}

ScheduleSpec parse_schedule(const std::string& text) {
  const std::string s = trim(text);
  if (s == "adaptive") return {ScheduleSpec::Kind::kAdaptive, 0.5};
  if (s == "baseline") return {ScheduleSpec::Kind::kBaseline, 0.5};
  if (s == "none") return {ScheduleSpec::Kind::kNone, 0.5};
  const std::string prefix = "fixed-alpha=";
  if (s.rfind(prefix, 0) == 0) {
    const double a = to_double(s.substr(prefix.size()));
    if (!(a >= 0.0 && a <= 1.0))
      throw std::invalid_argument("fixed-alpha outside [0, 1]: " + s);
    return {ScheduleSpec::Kind::kFixedAlpha, a};
  }
  throw std::invalid_argument(
      "unknown schedule '" + s +
      "' (expected adaptive | fixed-alpha=A | baseline | none)");
}

std::vector<std::pair<std::string, std::string>> load_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t[0] == '[')
      throw std::invalid_argument("config sections are not supported (line " +
                                  std::to_string(line_no) + ")");
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key=value at config line " +
                                  std::to_string(line_no));
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 &&
        ((value.front() == '"' && value.back() == '"') ||
         (value.front() == '\'' && value.back() == '\'')))
      value = value.substr(1, value.size() - 2);
    if (key.empty())
      throw std::invalid_argument("empty key at config line " +
                                  std::to_string(line_no));
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::string> expand_config_args(int argc,
                                            const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::size_t sub = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].empty() && args[i][0] != '-') {
      sub = i;
      break;
    }
  }
  if (sub == args.size()) return args;

  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t i = sub + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }

  std::vector<std::string> out(args.begin(), args.begin() + sub + 1);
  if (!config_path.empty()) {
    for (const auto& [key, value] : load_config_file(config_path))
      out.push_back("--" + key + "=" + value);
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_hex(const std::string& text) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

Dataset resolve_dataset(const std::string& arg) {
  if (std::filesystem::exists(arg)) {
    return {std::filesystem::path(arg).stem().string(),
            pgo::load_g2o_file(arg)};
  }
  const auto names = pgo::reference_set_names();
  if (std::find(names.begin(), names.end(), arg) != names.end())
    return {arg, pgo::make_reference_set(arg).graph};
  std::string known;
  for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("dataset '" + arg +
                              "' is neither a file nor a reference set (" +
                              known + ")");
}

std::string labels_path_for(const std::string& g2o_path) {
  std::filesystem::path p(g2o_path);
  p.replace_extension();
  return p.string() + ".labels.csv";
}

void write_labels_csv(const std::string& path, const pgo::AnyGraph& g) {
  CsvWriter csv(path, {"factor", "i", "j", "label"});
  std::visit(
      [&](const auto& graph) {
        for (std::size_t k = 0; k < graph.factors.size(); ++k) {
          const auto& f = graph.factors[k];
          if (!f.truth_label) continue;
          csv.row({std::to_string(k), std::to_string(f.i), std::to_string(f.j),
                   f.truth_label == pgo::TruthLabel::kTrueLoop ? "true_loop"
                                                               : "false_loop"});
        }
      },
      g);
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw std::logic_error("csv row width mismatch");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out_ << ',';
    out_ << cells[k];
  }
  out_ << '\n';
}

namespace {

template <class PoseT>
RunBundle run_pipeline(const pgo::PoseGraph<PoseT>& graph,
                       const ScheduleSpec& spec,
                       const pgo::GncConfig& base_config) {
  using Traits = pgo::GroupTraits<PoseT>;
  constexpr int kDof = Traits::kDof;

  pgo::PoseGraph<PoseT> working = graph;
  auto initial = pgo::dead_reckoning(working);
  if (!working.poses.empty()) {
    const PoseT origin = working.poses.front();
    for (auto& p : initial) p = Traits::compose(origin, p);
  }
  pgo::ensure_prior(working,
                    initial.empty() ? Traits::identity() : initial.front());

  RunBundle out;
  for (std::size_t k = 0; k < graph.factors.size(); ++k)
    if (graph.factors[k].kind == pgo::FactorKind::kLoop)
      out.loop_indices.push_back(static_cast<int>(k));

  std::vector<PoseT> solved = initial;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (spec.kind == ScheduleSpec::Kind::kNone) {
      const auto res =
          pgo::optimize(working, pgo::RobustState{}, initial, base_config.solver);
      solved = res.poses;
      out.converged = res.converged;
      out.history.push_back(
          {{}, res.cost, res.iterations, res.converged});
      for (int idx : out.loop_indices) {
        const double m = res.whitened_norms[static_cast<std::size_t>(idx)] *
                         res.whitened_norms[static_cast<std::size_t>(idx)];
        out.final_m.push_back(m);
        out.classification.push_back(pgo::classify(m, kDof, base_config));
      }
    } else {
      pgo::GncConfig cfg = base_config;
      cfg.fixed_alpha = spec.alpha;
      cfg.schedule = spec.kind == ScheduleSpec::Kind::kAdaptive
                         ? pgo::ScheduleKind::kAdaptive
                         : (spec.kind == ScheduleSpec::Kind::kBaseline
                                ? pgo::ScheduleKind::kBaseline
                                : pgo::ScheduleKind::kFixedAlpha);
      auto res = pgo::run_gnc(working, cfg, initial);
      solved = std::move(res.poses);
      out.loop_indices = std::move(res.loop_factor_indices);
      out.classification = std::move(res.classification);
      out.final_m = std::move(res.final_m);
      out.history = std::move(res.history);
      out.converged = res.converged;
    }
  } catch (const pgo::SolverDiverged&) {
    // Partial result: the initial guess plus a best-effort classification.
    out.diverged = true;
    out.classification.clear();
    out.final_m.clear();
    try {
      const auto norms = pgo::whitened_norms(working, initial);
      for (int idx : out.loop_indices) {
        const double m = norms[static_cast<std::size_t>(idx)] *
                         norms[static_cast<std::size_t>(idx)];
        out.final_m.push_back(m);
        out.classification.push_back(pgo::classify(m, kDof, base_config));
      }
    } catch (const std::exception&) {
      out.final_m.assign(out.loop_indices.size(),
                         std::numeric_limits<double>::infinity());
      out.classification.assign(out.loop_indices.size(),
                                pgo::Classification::kOutlier);
    }
  }
  out.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  out.outer_rounds = static_cast<int>(out.history.size());
  for (const auto& r : out.history) out.inner_iters += r.inner_iterations;

  pgo::PoseGraph<PoseT> estimate = graph;
  estimate.poses = std::move(solved);
  out.estimate = pgo::AnyGraph(std::move(estimate));
  return out;
}

}  // namespace

RunBundle run_any(const pgo::AnyGraph& graph, const ScheduleSpec& schedule,
                  const pgo::GncConfig& base_config) {
  return std::visit(
      [&](const auto& g) { return run_pipeline(g, schedule, base_config); },
      graph);
}

pgo::TrajectoryMetrics metrics_any(const pgo::AnyGraph& estimate,
                                   const pgo::AnyGraph& gt, int delta) {
  return std::visit(
      [&](const auto& a, const auto& b) -> pgo::TrajectoryMetrics {
        if constexpr (std::is_same_v<std::decay_t<decltype(a)>,
                                     std::decay_t<decltype(b)>>) {
          return pgo::trajectory_metrics(a.poses, b.poses, delta);
        } else {
          throw std::invalid_argument(
              "estimate and ground truth dimensions differ");
        }
      },
      estimate, gt);
}

bool labels_metrics(const pgo::AnyGraph& graph, const RunBundle& bundle,
                    pgo::ClassificationMetrics* out) {
  std::vector<pgo::TruthLabel> labels;
  std::vector<pgo::Classification> cls;
  std::visit(
      [&](const auto& g) {
        for (std::size_t k = 0; k < bundle.loop_indices.size(); ++k) {
          const auto& f =
              g.factors[static_cast<std::size_t>(bundle.loop_indices[k])];
          if (!f.truth_label) continue;
          labels.push_back(*f.truth_label);
          cls.push_back(bundle.classification[k]);
        }
      },
      graph);
  if (labels.empty()) return false;
  *out = pgo::precision_recall(labels, cls);
  return true;
}

int thread_cap(int requested) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("PGO_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

}  // namespace pgocli
