// Graduated non-convexity outer loop: per-loop-factor Mahalanobis
// classification, alpha from the chi-square ramp, adaptive mu graduation
// through the spline shape function, and the final classification /
// mu_init adjustment cycle. A convex quadratic "baseline" schedule is kept
// alongside for comparison runs.
#pragma once

#include <string>
#include <vector>

#include "pgo/chi2.hpp"
#include "pgo/graph.hpp"
#include "pgo/nlls_solver.hpp"

namespace pgo {

enum class ScheduleKind { kAdaptive, kFixedAlpha, kBaseline };

const char* schedule_name(ScheduleKind k);

struct GncConfig {
  double c = 3.0;            // kernel constant
  int n_max = 10;            // graduation steps to reach mu = 1
  int max_outer_rounds = 30; // total graduate+solve rounds across cycles
  double chi2_lo_p = 0.25;
  double chi2_hi_p = 0.9;
  ScheduleKind schedule = ScheduleKind::kAdaptive;
  double fixed_alpha = 0.5;  // used by kFixedAlpha only
  SolverConfig solver;
};

enum class Classification { kInlier, kAmbiguous, kOutlier };

const char* classification_name(Classification c);

struct FactorGncState {
  double mu = 0.0;
  double mu_init = 0.0;
  int step = 0;
  double alpha = 0.0;
  double m = 0.0;  // last Mahalanobis distance
  Classification classification = Classification::kAmbiguous;
};

// Eq.-style linear ramp: 0 below the chi-square lo quantile, 1 at or above
// the hi quantile, linear in between.
double compute_alpha(double m, int dof, const GncConfig& cfg);

// Inlier iff m < chi2(lo_p, dof); Outlier iff m >= chi2(hi_p, dof).
Classification classify(double m, int dof, const GncConfig& cfg);

// One graduation step for one factor: refresh alpha from m (adaptive),
// advance the step counter, and raise mu along the schedule. mu never
// decreases and never drops below mu_init.
FactorGncState graduate(const FactorGncState& state, const GncConfig& cfg,
                        double m, int dof);

struct GncRound {
  std::vector<double> mu;  // per loop factor, graph order
  double cost = 0.0;
  int inner_iterations = 0;
  bool inner_converged = false;
};

template <class PoseT>
struct GncResult {
  std::vector<PoseT> poses;
  std::vector<int> loop_factor_indices;          // into graph.factors
  std::vector<Classification> classification;    // per loop factor
  std::vector<double> final_m;                   // per loop factor
  std::vector<GncRound> history;
  double wall_time_s = 0.0;
  bool converged = false;

  int total_inner_iterations() const {
    int n = 0;
    for (const auto& r : history) n += r.inner_iterations;
    return n;
  }
};

// Odometry composed from the identity; poses no odometry factor reaches stay
// at identity.
template <class PoseT>
std::vector<PoseT> dead_reckoning(const PoseGraph<PoseT>& graph);

// Adds a strong prior anchoring node 0 at `anchor` if the graph has none.
// Returns true if a factor was added.
template <class PoseT>
bool ensure_prior(PoseGraph<PoseT>& graph, const PoseT& anchor);

// Full outer loop. Rounds of (classify distances, graduate, inner solve)
// until every loop factor sits at mu = 1 with a converged inner solve; then a
// final classification pass adjusts mu_init (Outlier -> 1, Inlier -> 0,
// Ambiguous keeps its mu) and, if the classification moved, graduation runs
// once more from the new mu_init values; the pass after that is final.
// Capped at max_outer_rounds solves in total; `converged` is false when the
// cap is the reason it stopped. Throws NoPrior; inner-solver errors
// propagate.
template <class PoseT>
GncResult<PoseT> run_gnc(const PoseGraph<PoseT>& graph, const GncConfig& cfg,
                         const std::vector<PoseT>& initial_estimate);

template <class PoseT>
GncResult<PoseT> run_gnc(const PoseGraph<PoseT>& graph, const GncConfig& cfg);

}  // namespace pgo
