#include "pwfwi/prox.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

#include "pwfwi/field_ops.hpp"

namespace pwfwi {

RegularizerKind parse_regularizer_kind(const std::string& name) {
  std::string s;
  s.reserve(name.size());
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "dmp") return RegularizerKind::DMP;
  if (s == "tikhonov") return RegularizerKind::Tikhonov;
  if (s == "tv") return RegularizerKind::TV;
  if (s == "jtt") return RegularizerKind::JTT;
  if (s == "tt") return RegularizerKind::TT;
  if (s == "tgv") return RegularizerKind::TGV;
  throw ConfigError("unknown regularizer kind '" + name +
                    "' (expected DMP, Tikhonov, TV, JTT, TT, or TGV)");
}

std::string to_string(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::DMP: return "DMP";
    case RegularizerKind::Tikhonov: return "Tikhonov";
    case RegularizerKind::TV: return "TV";
    case RegularizerKind::JTT: return "JTT";
    case RegularizerKind::TT: return "TT";
    case RegularizerKind::TGV: return "TGV";
  }
  return "?";
}

void RegularizerSpec::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("regularizer alpha must lie in [0, 1]");
  if (is_split() && !(alpha > 0.0 && alpha < 1.0))
    throw ConfigError(to_string(kind) + " requires alpha strictly inside (0, 1)");
}

BoxBounds BoxBounds::uniform(int n, double lo, double hi) {
  if (!(lo <= hi)) throw ConfigError("box bounds require lower <= upper");
  BoxBounds b;
  b.lower = VectorXd::Constant(n, lo);
  b.upper = VectorXd::Constant(n, hi);
  return b;
}

void BoxBounds::validate(int n) const {
  if (empty()) return;
  if (lower.size() != n || upper.size() != n)
    throw ConfigError("box bounds size does not match the grid");
  if (((upper - lower).array() < 0.0).any())
    throw ConfigError("box bounds require lower <= upper everywhere");
}

namespace {

void require_open_unit(double alpha, const char* op) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError(std::string(op) + " requires alpha in (0, 1)");
}

}  // namespace

double soft_threshold(double x, double alpha) {
  require_open_unit(alpha, "soft_threshold");
  const double tau = alpha / (2.0 * (1.0 - alpha));
  const double a = std::abs(x);
  return a <= tau ? 0.0 : x * (1.0 - tau / a);
}

VectorXd soft_threshold(const VectorXd& x, double alpha) {
  require_open_unit(alpha, "soft_threshold");
  VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = soft_threshold(x[i], alpha);
  return out;
}

double huber(double x, double alpha) {
  require_open_unit(alpha, "huber");
  const double tau = alpha / (2.0 * (1.0 - alpha));
  const double a = std::abs(x);
  if (a <= tau) return (1.0 - alpha) * x * x;
  return alpha * a - alpha * alpha / (4.0 * (1.0 - alpha));
}

double huber_eval(const VectorXd& x, double alpha) {
  require_open_unit(alpha, "huber_eval");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += huber(x[i], alpha);
  return s;
}

GradField shrink_isotropic(const GradField& z, double t) {
  if (!(t >= 0.0)) throw ConfigError("shrink threshold must be nonnegative");
  const VectorXd mag = magnitude(z);
  GradField out(z.grid);
  for (Eigen::Index i = 0; i < mag.size(); ++i) {
    const double s = mag[i] > t ? 1.0 - t / mag[i] : 0.0;
    out.x[i] = s * z.x[i];
    out.z[i] = s * z.z[i];
  }
  return out;
}

HessField shrink_isotropic(const HessField& z, double t) {
  if (!(t >= 0.0)) throw ConfigError("shrink threshold must be nonnegative");
  const VectorXd mag = magnitude(z);
  HessField out(z.grid, z.mixed);
  for (Eigen::Index i = 0; i < mag.size(); ++i) {
    const double s = mag[i] > t ? 1.0 - t / mag[i] : 0.0;
    out.xx[i] = s * z.xx[i];
    out.xz[i] = s * z.xz[i];
    out.zz[i] = s * z.zz[i];
  }
  return out;
}

VectorXd project_box(const VectorXd& x, const BoxBounds& bounds) {
  if (bounds.empty()) return x;
  bounds.validate(static_cast<int>(x.size()));
  return x.cwiseMax(bounds.lower).cwiseMin(bounds.upper);
}

namespace {

double sq_norm_hess(const HessField& h) {
  double s = h.xx.squaredNorm() + h.zz.squaredNorm();
  if (h.mixed) s += 2.0 * h.xz.squaredNorm();
  return s;
}

// ADMM solve of the split-denoising problem behind eval_regularizer for
// TT/TGV: minimize over m2 the value of the split regularizer with
// m1 = m - m2.  The split is invariant under constant shifts of m2, so a
// tiny diagonal damping fixes the representative.
ScalarField minimize_split(const RegularizerSpec& spec, const ScalarField& m,
                           int iterations) {
  const ModelGrid& grid = m.grid;
  const int n = grid.cell_count();
  const double alpha = spec.alpha;

  const GradField gm = grad_forward(m);
  const double mean_grad = magnitude(gm).mean();
  const double rho1 = alpha / std::max(mean_grad, 1e-12);
  const double rho2 = (1.0 - alpha) / std::max(mean_grad, 1e-12);

  SpMat quad = grad_gram(grid) * rho1;
  if (spec.kind == RegularizerKind::TT)
    quad += hess_gram(grid, spec.mixed_hessian) * (2.0 * (1.0 - alpha));
  else
    quad += hess_gram(grid, spec.mixed_hessian) * rho2;
  const double damp = 1e-10 * quad.diagonal().mean();
  for (int i = 0; i < n; ++i) quad.coeffRef(i, i) += damp;

  Eigen::SimplicialLDLT<SpMat> chol(quad);
  if (chol.info() != Eigen::Success)
    throw NumericalError("split-denoising factorization failed");

  ScalarField m2 = ScalarField::zeros(grid);
  GradField w(grid), ws(grid);
  HessField r(grid, spec.mixed_hessian), rs(grid, spec.mixed_hessian);
  const bool tgv = spec.kind == RegularizerKind::TGV;

  for (int it = 0; it < iterations; ++it) {
    // m2-step: quadratic in m2 given w (and r).
    GradField tgt(grid);
    tgt.x = gm.x - w.x + ws.x;
    tgt.z = gm.z - w.z + ws.z;
    ScalarField rhs = grad_adjoint(tgt);
    rhs.values *= rho1;
    if (tgv) {
      HessField ht(grid, spec.mixed_hessian);
      ht.xx = r.xx - rs.xx;
      ht.xz = r.xz - rs.xz;
      ht.zz = r.zz - rs.zz;
      rhs.values += rho2 * second_diff_adjoint(ht).values;
    }
    m2.values = chol.solve(rhs.values);

    const GradField gm2 = grad_forward(m2);
    GradField zw(grid);
    zw.x = gm.x - gm2.x + ws.x;
    zw.z = gm.z - gm2.z + ws.z;
    w = shrink_isotropic(zw, alpha / rho1);
    ws.x += gm.x - gm2.x - w.x;
    ws.z += gm.z - gm2.z - w.z;

    if (tgv) {
      const HessField hm2 = second_diff(m2, spec.mixed_hessian);
      HessField zr(grid, spec.mixed_hessian);
      zr.xx = hm2.xx + rs.xx;
      zr.xz = hm2.xz + rs.xz;
      zr.zz = hm2.zz + rs.zz;
      r = shrink_isotropic(zr, (1.0 - alpha) / rho2);
      rs.xx += hm2.xx - r.xx;
      rs.xz += hm2.xz - r.xz;
      rs.zz += hm2.zz - r.zz;
    }
  }
  return m2;
}

}  // namespace

double eval_regularizer(const RegularizerSpec& spec, const ScalarField& m1,
                        const ScalarField& m2) {
  spec.validate();
  if (!spec.is_split())
    throw ConfigError("split overload of eval_regularizer requires TT or TGV");
  if (m1.grid != m2.grid) throw ConfigError("split components live on different grids");
  const double alpha = spec.alpha;
  const double l1 = magnitude(grad_forward(m1)).sum();
  if (spec.kind == RegularizerKind::TT)
    return alpha * l1 + (1.0 - alpha) * sq_norm_hess(second_diff(m2, spec.mixed_hessian));
  return alpha * l1 +
         (1.0 - alpha) * magnitude(second_diff(m2, spec.mixed_hessian)).sum();
}

double eval_regularizer(const RegularizerSpec& spec, const ScalarField& m,
                        int inner_iterations) {
  spec.validate();
  switch (spec.kind) {
    case RegularizerKind::DMP:
      return m.values.squaredNorm();
    case RegularizerKind::Tikhonov:
      return sq_norm_hess(second_diff(m, spec.mixed_hessian));
    case RegularizerKind::TV:
      return magnitude(grad_forward(m)).sum();
    case RegularizerKind::JTT:
      return (1.0 - spec.alpha) * sq_norm_hess(second_diff(m, spec.mixed_hessian)) +
             spec.alpha * magnitude(grad_forward(m)).sum();
    case RegularizerKind::TT:
    case RegularizerKind::TGV: {
      const ScalarField m2 = minimize_split(spec, m, inner_iterations);
      ScalarField m1(m.grid, m.values - m2.values);
      return eval_regularizer(spec, m1, m2);
    }
  }
  throw ConfigError("unknown regularizer kind");
}

}  // namespace pwfwi
