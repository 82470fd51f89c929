// Sparse Levenberg-Marquardt on SE(2)/SE(3) pose graphs with per-factor IRLS
// robust weights. This is the inner optimizer the graduation loop calls
// between mu updates; with an empty RobustState it is a plain Gauss-Newton/LM
// least-squares solver.
#pragma once

#include <Eigen/Core>
#include <vector>

#include "pgo/graph.hpp"

namespace pgo {

struct SolverConfig {
  int max_iterations = 100;  // linear solves, counting rejected steps
  double lambda_init = 1e-4;
  double lambda_up = 10.0;    // rejected step: lambda *= lambda_up
  double lambda_down = 10.0;  // accepted step: lambda /= lambda_down
  double rel_cost_tol = 1e-6;
  double step_norm_tol = 1e-8;
};

// Robust-kernel settings for one solve. `mu` carries one entry per factor in
// graph order; only Loop factors are robustified, the entries for other
// factors are ignored. An empty `mu` disables the kernel everywhere (every
// factor quadratic).
struct RobustState {
  double c = 3.0;
  std::vector<double> mu;

  bool robust() const { return !mu.empty(); }
};

// One linearized factor: whitened Jacobian blocks and residual, already
// scaled by sqrt(w). Priors have j = -1 and jj unused.
template <class PoseT>
struct FactorBlock {
  using Traits = GroupTraits<PoseT>;
  int i = 0;
  int j = -1;
  typename Traits::Jacobian ji;
  typename Traits::Jacobian jj;
  typename Traits::Tangent r;
  double w = 1.0;
};

template <class PoseT>
struct LinearSystem {
  int num_poses = 0;
  std::vector<FactorBlock<PoseT>> blocks;
};

template <class PoseT>
struct SolveResult {
  std::vector<PoseT> poses;
  double cost = 0.0;
  int iterations = 0;  // linear solves performed
  bool converged = false;
  // Weight-free whitened residual norm per factor, in graph order; square it
  // for the Mahalanobis distance.
  std::vector<double> whitened_norms;
};

// Total objective at `estimate`: rho(|r_w|; mu_f, c) over robustified loop
// factors plus 0.5 |r_w|^2 over everything else.
template <class PoseT>
double robust_cost(const PoseGraph<PoseT>& graph, const RobustState& state,
                   const std::vector<PoseT>& estimate);

template <class PoseT>
std::vector<double> whitened_norms(const PoseGraph<PoseT>& graph,
                                   const std::vector<PoseT>& estimate);

// Whitened, sqrt(w)-scaled Jacobian blocks and residuals at `estimate`.
// Throws LengthMismatch if state.mu is non-empty with the wrong length.
template <class PoseT>
LinearSystem<PoseT> linearize(const PoseGraph<PoseT>& graph,
                              const RobustState& state,
                              const std::vector<PoseT>& estimate);

// Solves (J^T J + lambda diag(J^T J)) delta = -J^T r by sparse Cholesky with
// a fill-reducing ordering. On factorization failure the damping is escalated
// internally; throws IndefiniteSystem once escalation runs out.
template <class PoseT>
Eigen::VectorXd solve_normal_equations(const LinearSystem<PoseT>& system,
                                       double lambda);

// LM accept/reject loop on the robust cost. Requires a prior factor (throws
// NoPrior) and an initial estimate of the right length (LengthMismatch).
// Throws SolverDiverged if the tracked cost turns non-finite.
template <class PoseT>
SolveResult<PoseT> optimize(const PoseGraph<PoseT>& graph,
                            const RobustState& state,
                            const std::vector<PoseT>& initial_estimate,
                            const SolverConfig& cfg = {});

}  // namespace pgo
