// Trajectory and classification metrics: rigid alignment, ATE, RPE, and
// precision/recall over loop labels. Conventions: ATE is the position RMSE
// after closed-form rigid alignment (scale fixed at 1); RPE is the RMSE of
// relative-step translation/rotation error magnitudes.
#pragma once

#include <Eigen/Core>
#include <vector>

#include "pgo/gnc_engine.hpp"
#include "pgo/graph.hpp"

namespace pgo {

template <class PoseT>
struct RigidTransform {
  using Position = typename GroupTraits<PoseT>::Position;
  using Rotation = Eigen::Matrix<double, Position::RowsAtCompileTime,
                                 Position::RowsAtCompileTime>;
  Rotation rotation = Rotation::Identity();
  Position translation = Position::Zero();

  Position apply(const Position& p) const { return rotation * p + translation; }
};

// Least-squares rigid alignment of estimated onto ground-truth positions via
// the SVD closed form. Throws LengthMismatch on unequal lengths,
// std::invalid_argument below three poses, and DegenerateGeometry when the
// positions are collinear within 1e-9 (3D clouds leave the roll about the
// line unobservable).
template <class PoseT>
RigidTransform<PoseT> align(const std::vector<PoseT>& est,
                            const std::vector<PoseT>& gt);

double rmse(const std::vector<double>& values);

// Position RMSE after align(); alignment falls back to translation-only
// (centroid match) for degenerate geometry. Trajectories shorter than three
// poses are compared raw, since centroid alignment of two points forces
// equal-norm residuals and a rotation fit is underdetermined.
template <class PoseT>
double ate(const std::vector<PoseT>& est, const std::vector<PoseT>& gt);

struct RpeResult {
  double trans_rmse = 0.0;
  double rot_rmse = 0.0;
};

// RMSE over i of the translation/rotation magnitude of
// between(between(gt_i, gt_{i+delta}), between(est_i, est_{i+delta})).
template <class PoseT>
RpeResult rpe(const std::vector<PoseT>& est, const std::vector<PoseT>& gt,
              int delta = 1);

struct TrajectoryMetrics {
  double ate_rmse = 0.0;
  double rpe_trans_rmse = 0.0;
  double rpe_rot_rmse = 0.0;
};

template <class PoseT>
TrajectoryMetrics trajectory_metrics(const std::vector<PoseT>& est,
                                     const std::vector<PoseT>& gt,
                                     int delta = 1);

struct ClassificationMetrics {
  int tp = 0;
  int fp = 0;
  int tn = 0;
  int fn = 0;
  double precision = 1.0;  // 1 when tp + fp = 0
  double recall = 1.0;     // 1 when tp + fn = 0
};

// Positive class: a TrueLoop label. Accepted: classification other than
// Outlier (Ambiguous counts as accepted).
ClassificationMetrics precision_recall(
    const std::vector<TruthLabel>& labels,
    const std::vector<Classification>& classifications);

}  // namespace pgo
