#include "pgo/metrics.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "pgo/errors.hpp"

namespace pgo {
namespace {

template <class PoseT>
using Position = typename GroupTraits<PoseT>::Position;

template <class PoseT>
Position<PoseT> centroid(const std::vector<PoseT>& poses) {
  Position<PoseT> c = Position<PoseT>::Zero();
  for (const auto& p : poses) c += GroupTraits<PoseT>::position(p);
  return c / static_cast<double>(poses.size());
}

void check_lengths(std::size_t est, std::size_t gt) {
  if (est != gt) throw LengthMismatch(est, gt);
}

}  // namespace

double rmse(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum / static_cast<double>(values.size()));
}

template <class PoseT>
RigidTransform<PoseT> align(const std::vector<PoseT>& est,
                            const std::vector<PoseT>& gt) {
  using Traits = GroupTraits<PoseT>;
  using Transform = RigidTransform<PoseT>;
  using Rotation = typename Transform::Rotation;
  constexpr int kDim = Transform::Position::RowsAtCompileTime;

  check_lengths(est.size(), gt.size());
  if (est.size() < 3)
    throw std::invalid_argument("align: need at least 3 poses");

  const auto ce = centroid(est);
  const auto cg = centroid(gt);
  Rotation h = Rotation::Zero();
  for (std::size_t k = 0; k < est.size(); ++k) {
    h += (Traits::position(gt[k]) - cg) *
         (Traits::position(est[k]) - ce).transpose();
  }

  Eigen::JacobiSVD<Rotation> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const bool degenerate = kDim == 3 ? sv(1) <= 1e-9 * sv(0) : sv(0) <= 1e-12;
  if (degenerate)
    throw DegenerateGeometry(
        "align: positions are collinear, rotation unobservable");

  Rotation s = Rotation::Identity();
  s(kDim - 1, kDim - 1) =
      (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0
                                                                    : 1.0;
  Transform out;
  out.rotation = svd.matrixU() * s * svd.matrixV().transpose();
  out.translation = cg - out.rotation * ce;
  return out;
}

template <class PoseT>
double ate(const std::vector<PoseT>& est, const std::vector<PoseT>& gt) {
  using Traits = GroupTraits<PoseT>;
  check_lengths(est.size(), gt.size());
  if (est.empty()) return 0.0;

  RigidTransform<PoseT> transform;
  if (est.size() >= 3) {
    try {
      transform = align(est, gt);
    } catch (const DegenerateGeometry&) {
      transform.translation = centroid(gt) - centroid(est);
    }
  }

  std::vector<double> errors(est.size());
  for (std::size_t k = 0; k < est.size(); ++k) {
    errors[k] = (transform.apply(Traits::position(est[k])) -
                 Traits::position(gt[k]))
                    .norm();
  }
  return rmse(errors);
}

template <class PoseT>
RpeResult rpe(const std::vector<PoseT>& est, const std::vector<PoseT>& gt,
              int delta) {
  using Traits = GroupTraits<PoseT>;
  check_lengths(est.size(), gt.size());
  if (delta < 1) throw std::invalid_argument("rpe: delta must be >= 1");
  if (est.size() <= static_cast<std::size_t>(delta))
    throw std::invalid_argument("rpe: trajectory shorter than delta");

  const std::size_t n = est.size() - static_cast<std::size_t>(delta);
  std::vector<double> trans(n);
  std::vector<double> rot(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PoseT gt_step = Traits::between(gt[i], gt[i + delta]);
    const PoseT est_step = Traits::between(est[i], est[i + delta]);
    const PoseT err = Traits::between(gt_step, est_step);
    trans[i] = Traits::position(err).norm();
    rot[i] = Traits::rotation_angle(err);
  }
  return {rmse(trans), rmse(rot)};
}

template <class PoseT>
TrajectoryMetrics trajectory_metrics(const std::vector<PoseT>& est,
                                     const std::vector<PoseT>& gt, int delta) {
  const RpeResult r = rpe(est, gt, delta);
  return {ate(est, gt), r.trans_rmse, r.rot_rmse};
}

ClassificationMetrics precision_recall(
    const std::vector<TruthLabel>& labels,
    const std::vector<Classification>& classifications) {
  check_lengths(labels.size(), classifications.size());
  ClassificationMetrics m;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const bool positive = labels[k] == TruthLabel::kTrueLoop;
    const bool accepted = classifications[k] != Classification::kOutlier;
    if (positive && accepted) ++m.tp;
    if (positive && !accepted) ++m.fn;
    if (!positive && accepted) ++m.fp;
    if (!positive && !accepted) ++m.tn;
  }
  if (m.tp + m.fp > 0)
    m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  if (m.tp + m.fn > 0)
    m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  return m;
}

template RigidTransform<Pose2> align(const std::vector<Pose2>&,
                                     const std::vector<Pose2>&);
template RigidTransform<Pose3> align(const std::vector<Pose3>&,
                                     const std::vector<Pose3>&);
template double ate(const std::vector<Pose2>&, const std::vector<Pose2>&);
template double ate(const std::vector<Pose3>&, const std::vector<Pose3>&);
template RpeResult rpe(const std::vector<Pose2>&, const std::vector<Pose2>&,
                       int);
template RpeResult rpe(const std::vector<Pose3>&, const std::vector<Pose3>&,
                       int);
template TrajectoryMetrics trajectory_metrics(const std::vector<Pose2>&,
                                              const std::vector<Pose2>&, int);
template TrajectoryMetrics trajectory_metrics(const std::vector<Pose3>&,
                                              const std::vector<Pose3>&, int);

}  // namespace pgo
