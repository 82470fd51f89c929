// Pose-graph data model: variables, factors with square-root information,
// whitened residuals, and g2o text ingestion/emission (2D and 3D).
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pgo/geometry.hpp"

namespace pgo {

enum class FactorKind { kPrior, kOdometry, kLoop };
enum class TruthLabel { kTrueLoop, kFalseLoop };

template <class PoseT>
struct Factor {
  using Traits = GroupTraits<PoseT>;

  FactorKind kind = FactorKind::kOdometry;
  int i = 0;
  int j = 0;  // unused for Prior
  PoseT measurement;
  // Upper triangular, sqrt_information^T * sqrt_information = Omega.
  typename Traits::Jacobian sqrt_information = Traits::Jacobian::Identity();
  std::optional<TruthLabel> truth_label;  // Loop factors in synthetic sets

  typename Traits::Jacobian information() const {
    return sqrt_information.transpose() * sqrt_information;
  }
};

template <class PoseT>
struct PoseGraph {
  std::vector<PoseT> poses;  // index is the node id
  std::vector<Factor<PoseT>> factors;

  static constexpr int dimension = GroupTraits<PoseT>::kDof == 3 ? 2 : 3;
  int num_poses() const { return static_cast<int>(poses.size()); }
};

using Graph2 = PoseGraph<Pose2>;
using Graph3 = PoseGraph<Pose3>;
using AnyGraph = std::variant<Graph2, Graph3>;

template <class PoseT>
typename GroupTraits<PoseT>::Tangent whitened_residual(
    const Factor<PoseT>& f, const std::vector<PoseT>& poses) {
  using Traits = GroupTraits<PoseT>;
  if (f.kind == FactorKind::kPrior) {
    return f.sqrt_information *
           Traits::log(Traits::compose(Traits::inverse(f.measurement),
                                       poses[f.i]));
  }
  return f.sqrt_information *
         relative_residual(f.measurement, poses[f.i], poses[f.j]);
}

template <class PoseT>
typename GroupTraits<PoseT>::Tangent whitened_residual(
    const Factor<PoseT>& f, const PoseGraph<PoseT>& g) {
  return whitened_residual(f, g.poses);
}

// Squared whitened norm, directly comparable to chi-square quantiles.
template <class PoseT>
double mahalanobis(const Factor<PoseT>& f, const std::vector<PoseT>& poses) {
  return whitened_residual(f, poses).squaredNorm();
}

template <class PoseT>
double mahalanobis(const Factor<PoseT>& f, const PoseGraph<PoseT>& g) {
  return whitened_residual(f, g).squaredNorm();
}

// Checks node-id validity of every factor. Throws IndexOutOfRange.
template <class PoseT>
void validate_graph(const PoseGraph<PoseT>& g);

// Factor an information matrix into upper-triangular square-root form.
// Rejects non-PD matrices and condition numbers above 1e12.
// line_no feeds the error messages.
Eigen::Matrix3d sqrt_information_from(const Eigen::Matrix3d& info, int line_no);
Matrix6d sqrt_information_from(const Matrix6d& info, int line_no);

AnyGraph parse_g2o(const std::string& text);
std::string write_g2o(const Graph2& g);
std::string write_g2o(const Graph3& g);
std::string write_g2o(const AnyGraph& g);

AnyGraph load_g2o_file(const std::string& path);
void save_g2o_file(const std::string& path, const AnyGraph& g);

}  // namespace pgo
