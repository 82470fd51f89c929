// Dataset preparation: false-loop injection into existing graphs, synthetic
// graph generation from ground-truth trajectories, and the built-in reference
// trajectories the benchmarks run on. Everything is seed-deterministic.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pgo/graph.hpp"

namespace pgo {

enum class RateBasis {
  kOfTrue,   // n_false = round(rate * n_true)
  kOfTotal,  // n_false / (n_true + n_false) = rate
};

enum class LoopInfoPolicy { kCopyRandomLoop, kIdentity };

struct CorruptionConfig {
  double outlier_rate = 0.0;
  std::uint64_t seed = 0;
  int min_index_gap = 50;
  // Minimum separation of the sampled pair in the graph's current estimate;
  // negative means five times the mean odometry step.
  double min_gt_distance = -1.0;
  LoopInfoPolicy loop_info = LoopInfoPolicy::kCopyRandomLoop;
  RateBasis rate_basis = RateBasis::kOfTrue;
};

// Labels existing loops TrueLoop (where unlabeled) and adds
// round(rate * n_true) FalseLoop factors between uniformly sampled pose pairs
// that are far apart both by index and by position. Each false measurement
// is the identity perturbed by the noise model implied by its information
// matrix. Throws NotEnoughCandidatePairs, std::invalid_argument.
template <class PoseT>
PoseGraph<PoseT> inject_false_loops(const PoseGraph<PoseT>& graph,
                                    const CorruptionConfig& cfg);
AnyGraph inject_false_loops(const AnyGraph& graph,
                            const CorruptionConfig& cfg);

struct GenerationConfig {
  std::uint64_t seed = 0;
  // Tangent-space noise, one sigma per dof (translation first). Defaults are
  // sized for SE(2); SE(3) callers must supply six entries.
  std::vector<double> odo_sigma = {0.05, 0.05, 0.01};
  std::vector<double> loop_sigma = {0.05, 0.05, 0.01};
  std::vector<double> corruption_sigma = {1.0, 1.0, 0.5};
  double loop_radius = 1.5;   // proximity radius for loop candidates
  double loop_keep = 0.2;     // subsampling density of candidate pairs
  double corrupted_fraction = 0.0;
};

// Odometry between consecutive ground-truth poses plus proximity loop
// closures, all with Gaussian tangent noise and information set to the
// inverse noise covariance. A corrupted fraction of the loops receives
// additional large noise and the FalseLoop label; the rest are TrueLoop.
// The returned graph's poses are the ground truth. Throws LengthMismatch
// when a sigma vector does not match the dof, std::invalid_argument on
// out-of-range fractions or non-positive sigmas.
template <class PoseT>
PoseGraph<PoseT> generate_from_ground_truth(const std::vector<PoseT>& gt_poses,
                                            const GenerationConfig& cfg);

// ---------------------------------------------------------------------------
// Built-in reference trajectories. These are synthetic stand-ins shaped like
// the classic benchmark sets (sizes and loop densities in the same range),
// generated deterministically so runs are reproducible offline.

std::vector<Pose2> manhattan_world_gt(int n_poses, std::uint64_t seed,
                                      double half_extent);
std::vector<Pose3> sphere_gt(int n_rings, int ring_size, double radius);

struct ReferenceSet {
  std::string name;
  AnyGraph graph;  // noisy factors, TrueLoop labels, poses = ground truth
  AnyGraph gt;     // ground-truth poses only, no factors
};

// Known names: m3500, sphere2500, csail, intel. Throws std::invalid_argument
// for anything else.
ReferenceSet make_reference_set(const std::string& name);

std::vector<std::string> reference_set_names();

}  // namespace pgo
