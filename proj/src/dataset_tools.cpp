#include "pgo/dataset_tools.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "pgo/errors.hpp"
#include "pgo/random.hpp"

namespace pgo {
namespace {

template <class PoseT>
double mean_odometry_step(const PoseGraph<PoseT>& g) {
  using Traits = GroupTraits<PoseT>;
  double acc = 0.0;
  int n = 0;
  for (const auto& f : g.factors) {
    if (f.kind == FactorKind::kOdometry) {
      acc += Traits::position(f.measurement).norm();
      ++n;
    }
  }
  return n == 0 ? 0.0 : acc / n;
}

// Tangent draw with covariance (U^T U)^-1: solve U delta = xi, xi ~ N(0, I).
template <class PoseT>
typename GroupTraits<PoseT>::Tangent noise_from_sqrt_info(
    const typename GroupTraits<PoseT>::Jacobian& u, Rng& rng) {
  typename GroupTraits<PoseT>::Tangent xi;
  for (int d = 0; d < xi.size(); ++d) xi[d] = rng.normal();
  return u.template triangularView<Eigen::Upper>().solve(xi);
}

int count_false(double rate, RateBasis basis, int n_true) {
  if (rate < 0.0 || rate > 1.0) {
    throw std::invalid_argument("outlier_rate outside [0, 1]");
  }
  if (basis == RateBasis::kOfTotal) {
    if (rate >= 1.0) {
      throw std::invalid_argument("of_total rate must be below 1");
    }
    return static_cast<int>(std::lround(rate / (1.0 - rate) * n_true));
  }
  return static_cast<int>(std::lround(rate * n_true));
}

}  // namespace

template <class PoseT>
PoseGraph<PoseT> inject_false_loops(const PoseGraph<PoseT>& graph,
                                    const CorruptionConfig& cfg) {
  using Traits = GroupTraits<PoseT>;
  if (cfg.min_index_gap < 1) {
    throw std::invalid_argument("min_index_gap must be positive");
  }

  PoseGraph<PoseT> out = graph;
  std::vector<int> donor_loops;
  int n_true = 0;
  for (std::size_t k = 0; k < out.factors.size(); ++k) {
    auto& f = out.factors[k];
    if (f.kind != FactorKind::kLoop) continue;
    donor_loops.push_back(static_cast<int>(k));
    if (!f.truth_label) f.truth_label = TruthLabel::kTrueLoop;
    if (*f.truth_label == TruthLabel::kTrueLoop) ++n_true;
  }

  const int n_false = count_false(cfg.outlier_rate, cfg.rate_basis, n_true);
  if (n_false == 0) return out;

  const double min_dist = cfg.min_gt_distance >= 0.0
                              ? cfg.min_gt_distance
                              : 5.0 * mean_odometry_step(graph);
  const int n = out.num_poses();
  auto candidate = [&](int i, int j) {
    return j - i >= cfg.min_index_gap &&
           (Traits::position(out.poses[i]) - Traits::position(out.poses[j]))
                   .norm() >= min_dist;
  };

  std::uint64_t n_candidates = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + cfg.min_index_gap; j < n; ++j) {
      if (candidate(i, j)) ++n_candidates;
    }
  }
  if (n_candidates < static_cast<std::uint64_t>(n_false)) {
    throw NotEnoughCandidatePairs(n_false, static_cast<int>(n_candidates));
  }

  Rng rng(cfg.seed);
  std::set<std::uint64_t> chosen;
  if (2 * static_cast<std::uint64_t>(n_false) >= n_candidates) {
    std::vector<std::uint64_t> ordinals(n_candidates);
    for (std::uint64_t k = 0; k < n_candidates; ++k) ordinals[k] = k;
    for (int k = 0; k < n_false; ++k) {
      std::swap(ordinals[k], ordinals[k + rng.below(n_candidates - k)]);
    }
    chosen.insert(ordinals.begin(), ordinals.begin() + n_false);
  } else {
    while (chosen.size() < static_cast<std::size_t>(n_false)) {
      chosen.insert(rng.below(n_candidates));
    }
  }

  auto next = chosen.begin();
  std::uint64_t ordinal = 0;
  for (int i = 0; i < n && next != chosen.end(); ++i) {
    for (int j = i + cfg.min_index_gap; j < n && next != chosen.end(); ++j) {
      if (!candidate(i, j)) continue;
      if (ordinal++ != *next) continue;
      ++next;
      Factor<PoseT> f;
      f.kind = FactorKind::kLoop;
      f.i = i;
      f.j = j;
      f.truth_label = TruthLabel::kFalseLoop;
      if (cfg.loop_info == LoopInfoPolicy::kCopyRandomLoop) {
        f.sqrt_information =
            out.factors[donor_loops[rng.below(donor_loops.size())]]
                .sqrt_information;
      }
      f.measurement =
          Traits::exp(noise_from_sqrt_info<PoseT>(f.sqrt_information, rng));
      out.factors.push_back(f);
    }
  }
  return out;
}

AnyGraph inject_false_loops(const AnyGraph& graph,
                            const CorruptionConfig& cfg) {
  return std::visit(
      [&](const auto& g) -> AnyGraph { return inject_false_loops(g, cfg); },
      graph);
}

template <class PoseT>
PoseGraph<PoseT> generate_from_ground_truth(const std::vector<PoseT>& gt_poses,
                                            const GenerationConfig& cfg) {
  using Traits = GroupTraits<PoseT>;
  constexpr int kDof = Traits::kDof;
  if (gt_poses.size() < 2) {
    throw std::invalid_argument("need at least two ground-truth poses");
  }
  for (const auto* s : {&cfg.odo_sigma, &cfg.loop_sigma, &cfg.corruption_sigma}) {
    if (s->size() != static_cast<std::size_t>(kDof)) {
      throw LengthMismatch(s->size(), kDof);
    }
    for (double v : *s) {
      if (!(v > 0.0)) throw std::invalid_argument("sigmas must be positive");
    }
  }
  if (cfg.corrupted_fraction < 0.0 || cfg.corrupted_fraction > 1.0) {
    throw std::invalid_argument("corrupted_fraction outside [0, 1]");
  }
  if (cfg.loop_keep < 0.0 || cfg.loop_keep > 1.0) {
    throw std::invalid_argument("loop_keep outside [0, 1]");
  }
  if (!(cfg.loop_radius > 0.0)) {
    throw std::invalid_argument("loop_radius must be positive");
  }

  auto sqrt_info_of = [](const std::vector<double>& sigma) {
    typename Traits::Jacobian u = Traits::Jacobian::Zero();
    for (int d = 0; d < kDof; ++d) u(d, d) = 1.0 / sigma[d];
    return u;
  };
  auto draw = [](const std::vector<double>& sigma, Rng& rng) {
    typename Traits::Tangent xi;
    for (int d = 0; d < kDof; ++d) xi[d] = sigma[d] * rng.normal();
    return xi;
  };

  Rng rng(cfg.seed);
  PoseGraph<PoseT> out;
  out.poses = gt_poses;
  const int n = out.num_poses();

  const auto odo_info = sqrt_info_of(cfg.odo_sigma);
  for (int k = 0; k + 1 < n; ++k) {
    Factor<PoseT> f;
    f.kind = FactorKind::kOdometry;
    f.i = k;
    f.j = k + 1;
    f.measurement = Traits::compose(Traits::between(gt_poses[k], gt_poses[k + 1]),
                                    Traits::exp(draw(cfg.odo_sigma, rng)));
    f.sqrt_information = odo_info;
    out.factors.push_back(f);
  }

  const auto loop_info = sqrt_info_of(cfg.loop_sigma);
  std::vector<int> loop_factor_pos;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if ((Traits::position(gt_poses[i]) - Traits::position(gt_poses[j]))
              .norm() > cfg.loop_radius) {
        continue;
      }
      if (rng.uniform01() >= cfg.loop_keep) continue;
      Factor<PoseT> f;
      f.kind = FactorKind::kLoop;
      f.i = i;
      f.j = j;
      f.measurement = Traits::compose(Traits::between(gt_poses[i], gt_poses[j]),
                                      Traits::exp(draw(cfg.loop_sigma, rng)));
      f.sqrt_information = loop_info;
      f.truth_label = TruthLabel::kTrueLoop;
      loop_factor_pos.push_back(static_cast<int>(out.factors.size()));
      out.factors.push_back(f);
    }
  }

  const int n_corrupt = static_cast<int>(
      std::lround(cfg.corrupted_fraction * loop_factor_pos.size()));
  std::vector<int> order = loop_factor_pos;
  for (int k = 0; k < n_corrupt; ++k) {
    std::swap(order[k], order[k + rng.below(order.size() - k)]);
  }
  std::sort(order.begin(), order.begin() + n_corrupt);
  for (int k = 0; k < n_corrupt; ++k) {
    auto& f = out.factors[order[k]];
    f.measurement = Traits::compose(f.measurement,
                                    Traits::exp(draw(cfg.corruption_sigma, rng)));
    f.truth_label = TruthLabel::kFalseLoop;
  }
  return out;
}

std::vector<Pose2> manhattan_world_gt(int n_poses, std::uint64_t seed,
                                      double half_extent) {
  Rng rng(seed);
  std::vector<Pose2> out;
  out.reserve(n_poses);
  int x = 0, y = 0, h = 0;  // heading in quarter turns
  const int e = static_cast<int>(half_extent);
  auto dx = [](int h) { return h == 0 ? 1 : h == 2 ? -1 : 0; };
  auto dy = [](int h) { return h == 1 ? 1 : h == 3 ? -1 : 0; };
  auto inside = [&](int nx, int ny) {
    return nx >= -e && nx <= e && ny >= -e && ny <= e;
  };
  for (int k = 0; k < n_poses; ++k) {
    out.emplace_back(static_cast<double>(x), static_cast<double>(y),
                     h * M_PI / 2.0);
    const double u = rng.uniform01();
    int nh = u < 0.15 ? (h + 1) % 4 : u < 0.30 ? (h + 3) % 4 : h;
    if (!inside(x + dx(nh), y + dy(nh))) {
      for (int turn : {1, 3, 2}) {
        const int cand = (h + turn) % 4;
        if (inside(x + dx(cand), y + dy(cand))) {
          nh = cand;
          break;
        }
      }
    }
    h = nh;
    x += dx(h);
    y += dy(h);
  }
  return out;
}

std::vector<Pose3> sphere_gt(int n_rings, int ring_size, double radius) {
  const int n = n_rings * ring_size;
  std::vector<Eigen::Vector3d> pos(n);
  for (int k = 0; k < n; ++k) {
    const int r = k / ring_size;
    const int s = k % ring_size;
    const double lat = -1.4 + 2.8 * r / (n_rings - 1);
    const double lon = 2.0 * M_PI * s / ring_size;
    pos[k] = radius * Eigen::Vector3d(std::cos(lat) * std::cos(lon),
                                      std::cos(lat) * std::sin(lon),
                                      std::sin(lat));
  }
  std::vector<Pose3> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector3d zc = pos[k].normalized();  // outward normal
    Eigen::Vector3d d = k + 1 < n ? pos[k + 1] - pos[k] : pos[k] - pos[k - 1];
    Eigen::Vector3d xc = d - d.dot(zc) * zc;
    if (xc.norm() < 1e-12) xc = Eigen::Vector3d::UnitX();
    xc.normalize();
    const Eigen::Vector3d yc = zc.cross(xc);
    Eigen::Matrix3d rot;
    rot.col(0) = xc;
    rot.col(1) = yc;
    rot.col(2) = zc;
    out.emplace_back(pos[k], Eigen::Quaterniond(rot));
  }
  return out;
}

namespace {

GenerationConfig se3_generation(std::uint64_t seed, double keep,
                                double radius) {
  GenerationConfig cfg;
  cfg.seed = seed;
  cfg.odo_sigma = {0.05, 0.05, 0.05, 0.01, 0.01, 0.01};
  cfg.loop_sigma = cfg.odo_sigma;
  cfg.corruption_sigma = {1.0, 1.0, 1.0, 0.5, 0.5, 0.5};
  cfg.loop_radius = radius;
  cfg.loop_keep = keep;
  return cfg;
}

template <class PoseT>
AnyGraph gt_only(const std::vector<PoseT>& poses) {
  PoseGraph<PoseT> g;
  g.poses = poses;
  return g;
}

}  // namespace

ReferenceSet make_reference_set(const std::string& name) {
  ReferenceSet out;
  out.name = name;
  if (name == "m3500") {
    auto gt = manhattan_world_gt(3500, 35001, 15.0);
    GenerationConfig cfg;
    cfg.seed = 35002;
    cfg.loop_radius = 0.6;
    cfg.loop_keep = 0.28;
    out.graph = generate_from_ground_truth(gt, cfg);
    out.gt = gt_only(gt);
  } else if (name == "sphere2500") {
    auto gt = sphere_gt(50, 50, 25.0);
    out.graph = generate_from_ground_truth(gt, se3_generation(25001, 0.8, 1.6));
    out.gt = gt_only(gt);
  } else if (name == "csail") {
    auto gt = manhattan_world_gt(1045, 10451, 8.0);
    GenerationConfig cfg;
    cfg.seed = 10452;
    cfg.loop_radius = 0.6;
    cfg.loop_keep = 0.06;
    out.graph = generate_from_ground_truth(gt, cfg);
    out.gt = gt_only(gt);
  } else if (name == "intel") {
    auto gt = manhattan_world_gt(1228, 12281, 9.0);
    GenerationConfig cfg;
    cfg.seed = 12282;
    cfg.loop_radius = 0.6;
    cfg.loop_keep = 0.12;
    out.graph = generate_from_ground_truth(gt, cfg);
    out.gt = gt_only(gt);
  } else {
    throw std::invalid_argument("unknown reference set: " + name);
  }
  return out;
}

std::vector<std::string> reference_set_names() {
  return {"m3500", "sphere2500", "csail", "intel"};
}

template PoseGraph<Pose2> inject_false_loops<Pose2>(const PoseGraph<Pose2>&,
                                                    const CorruptionConfig&);
template PoseGraph<Pose3> inject_false_loops<Pose3>(const PoseGraph<Pose3>&,
                                                    const CorruptionConfig&);
template PoseGraph<Pose2> generate_from_ground_truth<Pose2>(
    const std::vector<Pose2>&, const GenerationConfig&);
template PoseGraph<Pose3> generate_from_ground_truth<Pose3>(
    const std::vector<Pose3>&, const GenerationConfig&);

}  // namespace pgo
