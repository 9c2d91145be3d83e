#pragma once

#include <optional>
#include <string>

#include "pwfwi/grid.hpp"

namespace pwfwi {

enum class RegularizerKind { DMP, Tikhonov, TV, JTT, TT, TGV };

RegularizerKind parse_regularizer_kind(const std::string& name);
std::string to_string(RegularizerKind kind);

// Regularizer selection.  alpha blends first-order (l1) against second-order
// terms in the compound kinds; the split kinds (TT, TGV) decompose the model
// as m = m1 + m2 with the l1 gradient acting on m1 and the second-order term
// on m2.
struct RegularizerSpec {
  RegularizerKind kind = RegularizerKind::DMP;
  double alpha = 0.5;
  bool mixed_hessian = false;

  bool is_compound() const {
    return kind == RegularizerKind::JTT || kind == RegularizerKind::TT ||
           kind == RegularizerKind::TGV;
  }
  bool is_split() const { return kind == RegularizerKind::TT || kind == RegularizerKind::TGV; }
  void validate() const;
};

// Per-cell box constraints on squared slowness.  Empty vectors mean
// unconstrained.
struct BoxBounds {
  VectorXd lower;
  VectorXd upper;

  static BoxBounds none() { return {}; }
  static BoxBounds uniform(int n, double lo, double hi);
  bool empty() const { return lower.size() == 0; }
  void validate(int n) const;
};

// Scalar blend prox/value pair: for the objective
//   phi(v) = alpha |v| + (1 - alpha) (v - x)^2,      alpha in (0, 1),
// soft_threshold returns argmin_v phi(v) = x * max(1 - tau/|x|, 0) with
// tau = alpha / (2 (1 - alpha)), and huber returns min_v phi(v):
//   (1-alpha) x^2                     if |x| <= tau
//   alpha |x| - alpha^2/(4 (1-alpha)) otherwise.
// huber_eval sums the elementwise Huber values of a vector.
double soft_threshold(double x, double alpha);
VectorXd soft_threshold(const VectorXd& x, double alpha);
double huber(double x, double alpha);
double huber_eval(const VectorXd& x, double alpha);

// Isotropic group shrinkage: prox of t * sum_i |z_i| where |z_i| is the
// per-cell group magnitude.  Every component of a cell is scaled by
// max(1 - t/|z_i|, 0).
GradField shrink_isotropic(const GradField& z, double t);
HessField shrink_isotropic(const HessField& z, double t);

// Componentwise clamp onto the box; identity for empty bounds.
VectorXd project_box(const VectorXd& x, const BoxBounds& bounds);

// Regularizer value in the form used for ranking:
//   DMP        |m|_2^2
//   Tikhonov   |D2 m|_2^2
//   TV         sum |grad m|           (isotropic)
//   JTT        (1-a) |D2 m|_2^2 + a sum |grad m|
//   TT         (1-a) |D2 m2|_2^2 + a sum |grad m1|
//   TGV        (1-a) sum |D2 m2| + a sum |grad m1|
// The split overload takes the decomposition as given.  The plain overload
// minimizes over the split numerically for TT/TGV (ADMM on the denoising
// subproblem), controlled by `inner_iterations`.
double eval_regularizer(const RegularizerSpec& spec, const ScalarField& m1,
                        const ScalarField& m2);
double eval_regularizer(const RegularizerSpec& spec, const ScalarField& m,
                        int inner_iterations = 400);

}  // namespace pwfwi
