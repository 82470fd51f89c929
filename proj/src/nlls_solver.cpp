#include "pgo/nlls_solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pgo/errors.hpp"
#include "pgo/robust_kernel.hpp"
#include "pgo/sig_batch.hpp"

namespace pgo {
namespace {

constexpr double kLambdaMax = 1e32;

void check_state(std::size_t n_factors, const RobustState& state) {
  if (state.robust() && state.mu.size() != n_factors) {
    throw LengthMismatch(state.mu.size(), n_factors);
  }
}

void check_config(const SolverConfig& cfg) {
  if (cfg.max_iterations <= 0 || cfg.lambda_init <= 0.0 ||
      cfg.lambda_up <= 1.0 || cfg.lambda_down <= 1.0 ||
      cfg.rel_cost_tol <= 0.0 || cfg.step_norm_tol <= 0.0) {
    throw std::invalid_argument("solver config out of range");
  }
}

// Squared whitened norms of the robustified factors plus the quadratic cost
// of everything else, staged so the batch kernel sees contiguous arrays.
template <class PoseT>
struct CostSplit {
  std::vector<double> loop_x;   // squared norms of robustified loops
  std::vector<double> loop_mu;  // matching mu values
  double quadratic = 0.0;       // 0.5 sum |r|^2 over the rest
};

template <class PoseT>
CostSplit<PoseT> split_cost(const PoseGraph<PoseT>& graph,
                            const RobustState& state,
                            const std::vector<PoseT>& estimate) {
  CostSplit<PoseT> out;
  out.loop_x.reserve(graph.factors.size());
  out.loop_mu.reserve(graph.factors.size());
  for (std::size_t k = 0; k < graph.factors.size(); ++k) {
    const auto& f = graph.factors[k];
    const double x = whitened_residual(f, estimate).squaredNorm();
    if (state.robust() && f.kind == FactorKind::kLoop) {
      out.loop_x.push_back(x);
      out.loop_mu.push_back(state.mu[k]);
    } else {
      out.quadratic += 0.5 * x;
    }
  }
  return out;
}

}  // namespace

template <class PoseT>
double robust_cost(const PoseGraph<PoseT>& graph, const RobustState& state,
                   const std::vector<PoseT>& estimate) {
  check_state(graph.factors.size(), state);
  const auto split = split_cost(graph, state, estimate);
  double total = split.quadratic;
  if (!split.loop_x.empty()) {
    std::vector<double> rho(split.loop_x.size());
    batch::costs(split.loop_x.data(), split.loop_mu.data(), rho.data(),
                 rho.size(), state.c);
    for (double v : rho) total += v;
  }
  return total;
}

template <class PoseT>
std::vector<double> whitened_norms(const PoseGraph<PoseT>& graph,
                                   const std::vector<PoseT>& estimate) {
  std::vector<double> out(graph.factors.size());
  for (std::size_t k = 0; k < graph.factors.size(); ++k) {
    out[k] = whitened_residual(graph.factors[k], estimate).norm();
  }
  return out;
}

template <class PoseT>
LinearSystem<PoseT> linearize(const PoseGraph<PoseT>& graph,
                              const RobustState& state,
                              const std::vector<PoseT>& estimate) {
  using Traits = GroupTraits<PoseT>;
  check_state(graph.factors.size(), state);

  LinearSystem<PoseT> sys;
  sys.num_poses = static_cast<int>(estimate.size());
  sys.blocks.resize(graph.factors.size());

  std::vector<double> loop_x, loop_mu;
  std::vector<std::size_t> loop_idx;
  for (std::size_t k = 0; k < graph.factors.size(); ++k) {
    const auto& f = graph.factors[k];
    auto& blk = sys.blocks[k];
    blk.i = f.i;
    blk.w = 1.0;
    if (f.kind == FactorKind::kPrior) {
      blk.j = -1;
      blk.r = Traits::log(Traits::compose(Traits::inverse(f.measurement),
                                          estimate[f.i]));
      blk.ji = f.sqrt_information * Traits::right_jacobian_inv(blk.r);
      blk.jj.setZero();
      blk.r = f.sqrt_information * blk.r;
      continue;
    }
    blk.j = f.j;
    typename Traits::Jacobian ji, jj;
    blk.r = f.sqrt_information * relative_residual(f.measurement, estimate[f.i],
                                                   estimate[f.j], &ji, &jj);
    blk.ji = f.sqrt_information * ji;
    blk.jj = f.sqrt_information * jj;
    if (state.robust() && f.kind == FactorKind::kLoop) {
      loop_idx.push_back(k);
      loop_x.push_back(blk.r.squaredNorm());
      loop_mu.push_back(state.mu[k]);
    }
  }

  if (!loop_idx.empty()) {
    std::vector<double> w(loop_idx.size());
    batch::weights(loop_x.data(), loop_mu.data(), w.data(), w.size(), state.c);
    for (std::size_t n = 0; n < loop_idx.size(); ++n) {
      auto& blk = sys.blocks[loop_idx[n]];
      const double sw = std::sqrt(w[n]);
      blk.w = w[n];
      blk.ji *= sw;
      blk.jj *= sw;
      blk.r *= sw;
    }
  }
  return sys;
}

namespace {

// Normal-equation assembly shared by the one-shot API and the LM loop.
// Every diagonal entry is seeded so damping never changes the pattern.
template <class PoseT>
void assemble(const LinearSystem<PoseT>& sys, Eigen::SparseMatrix<double>* h,
              Eigen::VectorXd* b) {
  constexpr int D = GroupTraits<PoseT>::kDof;
  const int dim = sys.num_poses * D;
  b->setZero(dim);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(dim) + 4 * D * D * sys.blocks.size());
  for (int k = 0; k < dim; ++k) trip.emplace_back(k, k, 0.0);

  auto add_block = [&](int row, int col, const auto& m) {
    for (int c = 0; c < D; ++c) {
      for (int r = 0; r < D; ++r) {
        trip.emplace_back(row * D + r, col * D + c, m(r, c));
      }
    }
  };
  for (const auto& blk : sys.blocks) {
    add_block(blk.i, blk.i, (blk.ji.transpose() * blk.ji).eval());
    b->segment<D>(blk.i * D).noalias() -= blk.ji.transpose() * blk.r;
    if (blk.j < 0) continue;
    add_block(blk.j, blk.j, (blk.jj.transpose() * blk.jj).eval());
    add_block(blk.i, blk.j, (blk.ji.transpose() * blk.jj).eval());
    add_block(blk.j, blk.i, (blk.jj.transpose() * blk.ji).eval());
    b->segment<D>(blk.j * D).noalias() -= blk.jj.transpose() * blk.r;
  }
  h->resize(dim, dim);
  h->setFromTriplets(trip.begin(), trip.end());
}

// H + lambda diag(H), written onto the existing (full) diagonal in place.
void apply_damping(const Eigen::VectorXd& diag, double lambda,
                   Eigen::SparseMatrix<double>* h) {
  for (int k = 0; k < h->rows(); ++k) {
    h->coeffRef(k, k) = diag[k] * (1.0 + lambda);
  }
}

struct NormalSolver {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
  bool analyzed = false;

  // One shot at the given damping; returns false on numerical failure.
  bool try_solve(Eigen::SparseMatrix<double>& h, const Eigen::VectorXd& diag,
                 const Eigen::VectorXd& b, double lambda,
                 Eigen::VectorXd* step) {
    apply_damping(diag, lambda, &h);
    if (!analyzed) {
      llt.analyzePattern(h);
      analyzed = true;
    }
    llt.factorize(h);
    if (llt.info() != Eigen::Success) return false;
    *step = llt.solve(b);
    // One round of iterative refinement keeps the linear-solve residual well
    // under the 1e-10 relative contract on badly scaled systems.
    *step += llt.solve(b - h * *step);
    return step->allFinite();
  }
};

}  // namespace

template <class PoseT>
Eigen::VectorXd solve_normal_equations(const LinearSystem<PoseT>& system,
                                       double lambda) {
  Eigen::SparseMatrix<double> h;
  Eigen::VectorXd b;
  assemble(system, &h, &b);
  const Eigen::VectorXd diag = h.diagonal();

  NormalSolver solver;
  Eigen::VectorXd step;
  double l = lambda;
  for (int attempt = 0; attempt < 8; ++attempt) {
    if (solver.try_solve(h, diag, b, l, &step)) return step;
    l = l <= 0.0 ? 1e-10 : l * 100.0;
  }
  throw IndefiniteSystem("normal equations not positive definite (lambda up to " +
                         std::to_string(l) + ")");
}

template <class PoseT>
SolveResult<PoseT> optimize(const PoseGraph<PoseT>& graph,
                            const RobustState& state,
                            const std::vector<PoseT>& initial_estimate,
                            const SolverConfig& cfg) {
  using Traits = GroupTraits<PoseT>;
  constexpr int D = Traits::kDof;
  check_config(cfg);
  check_state(graph.factors.size(), state);
  if (initial_estimate.size() != graph.poses.size()) {
    throw LengthMismatch(initial_estimate.size(), graph.poses.size());
  }
  bool has_prior = false;
  for (const auto& f : graph.factors) {
    has_prior = has_prior || f.kind == FactorKind::kPrior;
  }
  if (!has_prior) throw NoPrior();

  SolveResult<PoseT> res;
  res.poses = initial_estimate;
  res.cost = robust_cost(graph, state, res.poses);
  if (!std::isfinite(res.cost)) {
    throw SolverDiverged("initial cost is not finite");
  }

  NormalSolver solver;
  Eigen::SparseMatrix<double> h;
  Eigen::VectorXd b, diag, step;
  double lambda = cfg.lambda_init;

  while (res.iterations < cfg.max_iterations) {
    auto sys = linearize(graph, state, res.poses);
    assemble(sys, &h, &b);
    diag = h.diagonal();

    bool relinearize = false;
    while (res.iterations < cfg.max_iterations) {
      if (!solver.try_solve(h, diag, b, lambda, &step)) {
        lambda *= cfg.lambda_up;
        if (lambda > kLambdaMax) {
          throw IndefiniteSystem("factorization failed at maximum damping");
        }
        continue;
      }
      ++res.iterations;

      std::vector<PoseT> candidate(res.poses.size());
      for (std::size_t k = 0; k < res.poses.size(); ++k) {
        candidate[k] =
            Traits::compose(res.poses[k], Traits::exp(step.segment<D>(k * D)));
      }
      const double new_cost = robust_cost(graph, state, candidate);

      if (std::isfinite(new_cost) && new_cost <= res.cost) {
        const double drop = res.cost - new_cost;
        res.poses = std::move(candidate);
        res.cost = new_cost;
        if (!std::isfinite(res.cost)) {
          throw SolverDiverged("cost is not finite");
        }
        lambda /= cfg.lambda_down;
        if (drop <= cfg.rel_cost_tol * std::max(res.cost, 1e-300) ||
            step.norm() <= cfg.step_norm_tol) {
          res.converged = true;
        }
        relinearize = true;
        break;
      }
      // Rejected: damp harder. A step already below tolerance cannot shrink
      // into an improvement, so treat that as converged at the current point.
      if (step.norm() <= cfg.step_norm_tol) {
        res.converged = true;
        break;
      }
      lambda *= cfg.lambda_up;
      if (lambda > kLambdaMax) break;
    }
    if (res.converged || !relinearize) break;
  }

  res.whitened_norms = whitened_norms(graph, res.poses);
  return res;
}

template double robust_cost<Pose2>(const PoseGraph<Pose2>&, const RobustState&,
                                   const std::vector<Pose2>&);
template double robust_cost<Pose3>(const PoseGraph<Pose3>&, const RobustState&,
                                   const std::vector<Pose3>&);
template std::vector<double> whitened_norms<Pose2>(const PoseGraph<Pose2>&,
                                                   const std::vector<Pose2>&);
template std::vector<double> whitened_norms<Pose3>(const PoseGraph<Pose3>&,
                                                   const std::vector<Pose3>&);
template LinearSystem<Pose2> linearize<Pose2>(const PoseGraph<Pose2>&,
                                              const RobustState&,
                                              const std::vector<Pose2>&);
template LinearSystem<Pose3> linearize<Pose3>(const PoseGraph<Pose3>&,
                                              const RobustState&,
                                              const std::vector<Pose3>&);
template Eigen::VectorXd solve_normal_equations<Pose2>(
    const LinearSystem<Pose2>&, double);
template Eigen::VectorXd solve_normal_equations<Pose3>(
    const LinearSystem<Pose3>&, double);
template SolveResult<Pose2> optimize<Pose2>(const PoseGraph<Pose2>&,
                                            const RobustState&,
                                            const std::vector<Pose2>&,
                                            const SolverConfig&);
template SolveResult<Pose3> optimize<Pose3>(const PoseGraph<Pose3>&,
                                            const RobustState&,
                                            const std::vector<Pose3>&,
                                            const SolverConfig&);

}  // namespace pgo
