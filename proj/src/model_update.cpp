#include "pwfwi/model_update.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>

#include "pwfwi/field_ops.hpp"

namespace pwfwi {

namespace {

bool uses_first_order(const RegularizerSpec& spec, const ModelUpdateParams& params) {
  if (params.disable_first_order) return false;
  switch (spec.kind) {
    case RegularizerKind::TV:
    case RegularizerKind::JTT:
    case RegularizerKind::TT:
    case RegularizerKind::TGV:
      return true;
    default:
      return false;
  }
}

double l1_weight(const RegularizerSpec& spec) {
  return spec.kind == RegularizerKind::TV ? 1.0 : spec.alpha;
}

// Accumulated data-side pieces: T = sum Re(L^H L) and g = sum Re(L^H y),
// both diagonal/vector because L is diagonal per term.
struct DataGram {
  VectorXd T;
  VectorXd g;
};

DataGram accumulate(const std::vector<SourceTerm>& terms, int n) {
  if (terms.empty()) throw ConfigError("model update needs at least one source term");
  DataGram d{VectorXd::Zero(n), VectorXd::Zero(n)};
  for (const auto& t : terms) {
    if (t.L_diag.size() != n || t.y.size() != n)
      throw ConfigError("source term size does not match grid");
    d.T += t.L_diag.cwiseAbs2();
    d.g += (t.L_diag.conjugate().cwiseProduct(t.y)).real();
  }
  return d;
}

VectorXd box_targets(const InnerState& state) { return state.q + state.q_dual; }

}  // namespace

void ModelUpdateParams::validate(const RegularizerSpec& spec) const {
  spec.validate();
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (inner_iterations < 1) throw ConfigError("inner_iterations must be >= 1");
  if (!(epsilon_factor >= 0.0)) throw ConfigError("epsilon_factor must be nonnegative");
  if (uses_first_order(spec, *this) && !(zeta > 0.0))
    throw ConfigError("zeta must be positive for first-order regularizers");
  if (spec.kind == RegularizerKind::TGV && !(zeta2 > 0.0))
    throw ConfigError("zeta2 must be positive for TGV");
  if (spec.is_split() && !disable_first_order && !(epsilon_factor > 0.0))
    throw ConfigError("epsilon_factor must be positive for the joint system");
  if (!(quadratic_weight >= 0.0)) throw ConfigError("quadratic_weight must be nonnegative");
}

JointSystem assemble_joint(const std::vector<SourceTerm>& terms, const InnerState& state,
                           const ModelGrid& grid, const RegularizerSpec& spec,
                           const ModelUpdateParams& params) {
  if (!spec.is_split()) throw ConfigError("assemble_joint requires a split regularizer");
  const int n = grid.cell_count();
  const DataGram data = accumulate(terms, n);
  const double gamma = params.gamma, zeta = params.zeta, eta = params.eta;

  JointSystem js;
  js.g12 = gamma * data.T.array() + eta;

  SpMat diag_part(n, n);
  diag_part.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int i = 0; i < n; ++i) diag_part.insert(i, i) = js.g12[i];
  diag_part.makeCompressed();

  js.g11 = diag_part;
  if (!params.disable_first_order) js.g11 += zeta * grad_gram(grid);

  js.g22 = diag_part;
  if (spec.kind == RegularizerKind::TT)
    js.g22 += params.quadratic_weight * (1.0 - spec.alpha) *
              hess_gram(grid, spec.mixed_hessian);
  else
    js.g22 += params.zeta2 * hess_gram(grid, spec.mixed_hessian);

  // Without damping the pair (v, -v) with constant v is a null direction of
  // the joint system; epsilon breaks it.
  js.epsilon =
      params.epsilon_factor * 0.5 * (js.g11.diagonal().mean() + js.g22.diagonal().mean());
  if (js.epsilon > 0.0)
    for (int i = 0; i < n; ++i) {
      js.g11.coeffRef(i, i) += js.epsilon;
      js.g22.coeffRef(i, i) += js.epsilon;
    }

  const VectorXd box = eta * box_targets(state);
  js.h1 = gamma * data.g + box;
  if (!params.disable_first_order) {
    GradField tgt(grid);
    tgt.x = state.p.x + state.p_dual.x;
    tgt.z = state.p.z + state.p_dual.z;
    js.h1 += zeta * grad_adjoint(tgt).values;
  }
  js.h2 = gamma * data.g + box;
  if (spec.kind == RegularizerKind::TGV) {
    HessField tgt(grid, spec.mixed_hessian);
    tgt.xx = state.r.xx + state.r_dual.xx;
    tgt.xz = state.r.xz + state.r_dual.xz;
    tgt.zz = state.r.zz + state.r_dual.zz;
    js.h2 += params.zeta2 * second_diff_adjoint(tgt).values;
  }
  return js;
}

std::pair<VectorXd, VectorXd> solve_variable_projection(const JointSystem& js) {
  const int n = static_cast<int>(js.g12.size());
  if ((js.g12.array() <= 0.0).any())
    throw NumericalError("joint system coupling diagonal must be positive");

  const VectorXd dinv = js.g12.cwiseInverse();
  SpMat w = dinv.asDiagonal() * js.g11;  // G12^{-1} G11
  SpMat reduced = js.g22 * w;
  reduced *= -1.0;
  SpMat dmat(n, n);
  dmat.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int i = 0; i < n; ++i) dmat.insert(i, i) = js.g12[i];
  dmat.makeCompressed();
  reduced += dmat;
  reduced.makeCompressed();

  Eigen::SparseLU<SpMat> lu(reduced);
  if (lu.info() != Eigen::Success)
    throw NumericalError("variable-projection factorization failed");

  const double rhs_norm =
      std::sqrt(js.h1.squaredNorm() + js.h2.squaredNorm()) + 1e-300;
  VectorXd m1 = VectorXd::Zero(n), m2 = VectorXd::Zero(n);
  VectorXd r1 = js.h1, r2 = js.h2;  // residuals of the full 2n system
  double rel = 1.0;
  for (int pass = 0; pass < 3; ++pass) {
    const VectorXd rr = r2 - js.g22 * dinv.cwiseProduct(r1);
    const VectorXd dm1 = lu.solve(rr);
    const VectorXd dm2 = dinv.cwiseProduct(r1 - js.g11 * dm1);
    m1 += dm1;
    m2 += dm2;
    r1 = js.h1 - js.g11 * m1 - js.g12.cwiseProduct(m2);
    r2 = js.h2 - js.g12.cwiseProduct(m1) - js.g22 * m2;
    rel = std::sqrt(r1.squaredNorm() + r2.squaredNorm()) / rhs_norm;
    if (rel <= 1e-12) break;
  }
  if (!(rel <= 1e-9))
    throw NumericalError("variable-projection residual " + std::to_string(rel) +
                         " above tolerance");
  return {std::move(m1), std::move(m2)};
}

void inner_dual_ascent(InnerState& state, const ScalarField& m1, const ScalarField& m2,
                       const RegularizerSpec& spec) {
  if (state.q.size() != m1.values.size())
    throw ConfigError("inner state shapes do not match the model");
  const VectorXd msum = m1.values + m2.values;
  state.q_dual += state.q - msum;
  state.primal_residual_q = (state.q - msum).norm();

  const bool first_order = spec.kind != RegularizerKind::DMP &&
                           spec.kind != RegularizerKind::Tikhonov &&
                           state.p.x.size() == m1.values.size();
  if (first_order) {
    const GradField gm1 = grad_forward(m1);
    state.p_dual.x += state.p.x - gm1.x;
    state.p_dual.z += state.p.z - gm1.z;
    state.primal_residual_p =
        std::sqrt((state.p.x - gm1.x).squaredNorm() + (state.p.z - gm1.z).squaredNorm());
  }
  if (spec.kind == RegularizerKind::TGV) {
    const HessField hm2 = second_diff(m2, spec.mixed_hessian);
    state.r_dual.xx += state.r.xx - hm2.xx;
    state.r_dual.xz += state.r.xz - hm2.xz;
    state.r_dual.zz += state.r.zz - hm2.zz;
    state.primal_residual_r = std::sqrt((state.r.xx - hm2.xx).squaredNorm() +
                                        2.0 * (state.r.xz - hm2.xz).squaredNorm() +
                                        (state.r.zz - hm2.zz).squaredNorm());
  }
}

ModelUpdateResult update_model(const std::vector<SourceTerm>& terms,
                               const ScalarField& m1_prev, const ScalarField& m2_prev,
                               const RegularizerSpec& spec, const BoxBounds& bounds,
                               const ModelUpdateParams& params, InnerState& state) {
  params.validate(spec);
  if (m1_prev.grid != m2_prev.grid) throw ConfigError("split components on different grids");
  const ModelGrid grid = m1_prev.grid;
  const int n = grid.cell_count();
  bounds.validate(n);

  const bool split = spec.is_split() && !params.disable_first_order;
  const bool first_order = uses_first_order(spec, params);
  const bool tgv = spec.kind == RegularizerKind::TGV;

  if (!state.initialized) {
    state.p = first_order ? grad_forward(m1_prev) : GradField(grid);
    state.p_dual = GradField(grid);
    state.q = params.bounds_active ? project_box(m1_prev.values + m2_prev.values, bounds)
                                   : (m1_prev.values + m2_prev.values);
    state.q_dual = VectorXd::Zero(n);
    state.r = tgv ? second_diff(m2_prev, spec.mixed_hessian)
                  : HessField(grid, spec.mixed_hessian);
    state.r_dual = HessField(grid, spec.mixed_hessian);
    state.initialized = true;
    state.iterations_run = 0;
  }

  ScalarField m1 = m1_prev, m2 = m2_prev;

  // Single-variable kinds solve a fixed SPD system whose rhs changes with the
  // inner splits; factor it once.
  Eigen::SimplicialLDLT<SpMat> single_chol;
  DataGram data;
  if (!split) {
    data = accumulate(terms, n);
    SpMat M(n, n);
    M.reserve(Eigen::VectorXi::Constant(n, 1));
    for (int i = 0; i < n; ++i)
      M.insert(i, i) = params.gamma * data.T[i] + params.eta;
    M.makeCompressed();
    if (first_order) M += params.zeta * grad_gram(grid);
    switch (spec.kind) {
      case RegularizerKind::DMP: {
        SpMat eye(n, n);
        eye.setIdentity();
        M += params.quadratic_weight * eye;
        break;
      }
      case RegularizerKind::Tikhonov:
        M += params.quadratic_weight * hess_gram(grid, spec.mixed_hessian);
        break;
      case RegularizerKind::JTT:
        M += (1.0 - spec.alpha) * hess_gram(grid, spec.mixed_hessian);
        break;
      case RegularizerKind::TT:
      case RegularizerKind::TGV:
        // first-order branch disabled: single-variable solve on m2's block
        M += (spec.kind == RegularizerKind::TT
                  ? params.quadratic_weight * (1.0 - spec.alpha)
                  : params.zeta2) *
             hess_gram(grid, spec.mixed_hessian);
        break;
      default:
        break;
    }
    single_chol.compute(M);
    if (single_chol.info() != Eigen::Success)
      throw NumericalError("model update factorization failed");
  }

  for (int it = 0; it < params.inner_iterations; ++it) {
    if (split) {
      const JointSystem js = assemble_joint(terms, state, grid, spec, params);
      auto [v1, v2] = solve_variable_projection(js);
      m1.values = std::move(v1);
      m2.values = std::move(v2);
    } else {
      VectorXd rhs = params.gamma * data.g + params.eta * box_targets(state);
      if (first_order) {
        GradField tgt(grid);
        tgt.x = state.p.x + state.p_dual.x;
        tgt.z = state.p.z + state.p_dual.z;
        rhs += params.zeta * grad_adjoint(tgt).values;
      }
      m1.values = single_chol.solve(rhs);
      m2.values.setZero();
    }
    if (!m1.values.allFinite() || !m2.values.allFinite())
      throw NumericalError("model update produced non-finite values");

    if (first_order) {
      const GradField gm1 = grad_forward(m1);
      GradField z(grid);
      z.x = gm1.x - state.p_dual.x;
      z.z = gm1.z - state.p_dual.z;
      state.p = shrink_isotropic(z, l1_weight(spec) / params.zeta);
    }
    if (tgv && split) {
      const HessField hm2 = second_diff(m2, spec.mixed_hessian);
      HessField z(grid, spec.mixed_hessian);
      z.xx = hm2.xx - state.r_dual.xx;
      z.xz = hm2.xz - state.r_dual.xz;
      z.zz = hm2.zz - state.r_dual.zz;
      state.r = shrink_isotropic(z, (1.0 - spec.alpha) / params.zeta2);
    }
    const VectorXd v = m1.values + m2.values - state.q_dual;
    state.q = params.bounds_active ? project_box(v, bounds) : v;

    inner_dual_ascent(state, m1, m2, spec);
    state.iterations_run += 1;
  }

  ModelUpdateResult out;
  out.m = ScalarField(grid, m1.values + m2.values);
  if (params.bounds_active && !bounds.empty()) {
    const VectorXd clamped = project_box(out.m.values, bounds);
    m1.values += clamped - out.m.values;  // keep m = m1 + m2 exact after the clamp
    out.m.values = clamped;
  }
  out.m1 = std::move(m1);
  out.m2 = std::move(m2);
  return out;
}

}  // namespace pwfwi
