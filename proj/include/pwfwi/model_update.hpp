#pragma once

#include <vector>

#include "pwfwi/grid.hpp"
#include "pwfwi/prox.hpp"

namespace pwfwi {

// One (frequency, source) contribution to the model subproblem:
//   L_diag = omega^2 u          (diagonal of the virtual-source operator L)
//   y      = b + b_dual - L_pml u
// so that A(m) u - b - b_dual = diag(L_diag) m - y.  When the driver works in
// normalized model units, L_diag carries the normalization factor.
struct SourceTerm {
  VectorXcd L_diag;
  VectorXcd y;
};

// Primal/dual variables of the inner (denoising) ADMM.  p carries the
// first-difference split, q the box split, r the second-difference split
// used by TGV.  All duals use the convention dual += target - achieved.
struct InnerState {
  GradField p, p_dual;
  VectorXd q, q_dual;
  HessField r, r_dual;
  bool initialized = false;
  int iterations_run = 0;
  double primal_residual_p = 0.0;
  double primal_residual_q = 0.0;
  double primal_residual_r = 0.0;
};

struct ModelUpdateParams {
  double gamma = 1.0;   // data-fit weight (wave-equation misfit)
  double zeta = 0.0;    // first-difference split penalty
  double eta = 0.0;     // box split penalty (must be > 0)
  double zeta2 = 0.0;   // second-difference split penalty (TGV)
  int inner_iterations = 1;
  double epsilon_factor = 1e-8;  // diagonal damping of the joint system
  bool bounds_active = true;
  // Scale of the pure quadratic terms: the DMP/Tikhonov penalty and the
  // second-order term (1 - alpha) |D2 m2|^2 inside TT.  The quadratic cost of
  // a feature falls off with its squared amplitude, so in normalized model
  // units this weight must sit well above 1 for the TT decomposition to route
  // edges into m1; see the penalties discussion in the README.
  double quadratic_weight = 1.0;
  // Drops the first-difference branch and pins m1 = 0, reducing TT to a
  // Tikhonov-like single-variable solve.  Testing hook.
  bool disable_first_order = false;

  void validate(const RegularizerSpec& spec) const;
};

// Normal-equation blocks of the joint (m1, m2) problem, eliminating m2 by
// variable projection.  G12 = G21 is diagonal and stored as a vector; g11 and
// g22 already include the epsilon damping that removes the shared constant
// null direction.
struct JointSystem {
  SpMat g11;
  SpMat g22;
  VectorXd g12;
  VectorXd h1;
  VectorXd h2;
  double epsilon = 0.0;
};

JointSystem assemble_joint(const std::vector<SourceTerm>& terms, const InnerState& state,
                           const ModelGrid& grid, const RegularizerSpec& spec,
                           const ModelUpdateParams& params);

// Solves the 2n x 2n joint system via the reduced n x n problem
//   [G21 - G22 G12^{-1} G11] m1 = h2 - G22 G12^{-1} h1,   m2 = G12^{-1}(h1 - G11 m1).
// The relative residual of the full system must come out below 1e-9.
std::pair<VectorXd, VectorXd> solve_variable_projection(const JointSystem& js);

// Dual ascent step for the inner splits, using the current p/q/r stored in
// state; also records the primal residuals.
void inner_dual_ascent(InnerState& state, const ScalarField& m1, const ScalarField& m2,
                       const RegularizerSpec& spec);

struct ModelUpdateResult {
  ScalarField m;
  ScalarField m1;
  ScalarField m2;
};

// One outer-iteration model update: runs params.inner_iterations passes of
// {model solve, prox steps, dual ascent} for the selected regularizer, then
// returns m = m1 + m2 projected onto the bounds (when active; the clamp is
// absorbed into m1 so m = m1 + m2 always holds exactly).  state persists
// across outer iterations; it is (re)initialized from the previous model when
// not yet initialized.
ModelUpdateResult update_model(const std::vector<SourceTerm>& terms,
                               const ScalarField& m1_prev, const ScalarField& m2_prev,
                               const RegularizerSpec& spec, const BoxBounds& bounds,
                               const ModelUpdateParams& params, InnerState& state);

}  // namespace pwfwi
