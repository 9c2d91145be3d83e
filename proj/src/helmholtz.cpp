#include "pwfwi/helmholtz.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pwfwi {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Complex stretching factor for one axis at (possibly half-integer) cell
// coordinate t.  depth counts cells into the absorbing band; the quadratic
// ramp reaches sigma0 at the outer border.
struct AxisStretch {
  int n = 1;
  int width = 0;
  double sigma0 = 0.0;
  double omega = 1.0;

  Complex at(double t) const {
    if (width == 0) return Complex(1.0, 0.0);
    const double depth = std::max({0.0, double(width) - t, t - double(n - 1 - width)});
    if (depth <= 0.0) return Complex(1.0, 0.0);
    const double ratio = depth / double(width);
    return Complex(1.0, sigma0 * ratio * ratio / omega);
  }
};

}  // namespace

void Acquisition::validate(const ModelGrid& grid) const {
  const int n = grid.cell_count();
  if (source_cells.empty()) throw ConfigError("acquisition has no sources");
  if (receiver_cells.empty()) throw ConfigError("acquisition has no receivers");
  if (!source_amplitudes.empty() && source_amplitudes.size() != source_cells.size())
    throw ConfigError("source amplitude count does not match source count");
  for (int c : source_cells)
    if (c < 0 || c >= n) throw ConfigError("source cell out of range");
  std::vector<int> rcv = receiver_cells;
  std::sort(rcv.begin(), rcv.end());
  for (size_t i = 0; i < rcv.size(); ++i) {
    if (rcv[i] < 0 || rcv[i] >= n) throw ConfigError("receiver cell out of range");
    if (i > 0 && rcv[i] == rcv[i - 1]) throw ConfigError("receiver cells must be distinct");
  }
}

HelmholtzOperator HelmholtzOperator::assemble(const ScalarField& m, double frequency_hz,
                                              const PmlSpec& pml) {
  pml.validate();
  if (!(frequency_hz > 0.0)) throw ConfigError("frequency must be positive");
  if ((m.values.array() <= 0.0).any())
    throw ConfigError("squared slowness must be positive everywhere");
  const ModelGrid& grid = m.grid;
  const int nx = grid.nx, nz = grid.nz, n = grid.cell_count();
  if (pml.width > 0) {
    if (nx < 2 * pml.width + 1)
      throw ConfigError("grid x extent too small for pml width " + std::to_string(pml.width));
    if (nz > 1 && nz < 2 * pml.width + 1)
      throw ConfigError("grid z extent too small for pml width " + std::to_string(pml.width));
  }

  HelmholtzOperator op;
  op.grid_ = grid;
  op.frequency_hz_ = frequency_hz;
  op.omega_ = 2.0 * kPi * frequency_hz;
  op.pml_ = pml;

  const double h2 = grid.spacing * grid.spacing;
  const double c_ref = 1.0 / std::sqrt(m.values.mean());
  const double sigma0 =
      pml.width > 0
          ? -3.0 * c_ref * std::log(pml.reflection_target) / (2.0 * pml.width * grid.spacing)
          : 0.0;

  AxisStretch sx{nx, pml.width, sigma0, op.omega_};
  AxisStretch sz{nz, nz > 1 ? pml.width : 0, sigma0, op.omega_};

  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<size_t>(n) * 5);
  for (int ix = 0; ix < nx; ++ix) {
    const Complex sxc = sx.at(ix);
    const Complex axp = nx > 1 ? 1.0 / (sxc * sx.at(ix + 0.5) * h2) : Complex(0.0);
    const Complex axm = nx > 1 ? 1.0 / (sxc * sx.at(ix - 0.5) * h2) : Complex(0.0);
    for (int iz = 0; iz < nz; ++iz) {
      const int i = ix * nz + iz;
      Complex diag(0.0);
      if (nx > 1) {
        diag -= axp + axm;  // missing neighbors stay in the diagonal (zero Dirichlet outside)
        if (ix + 1 < nx) t.emplace_back(i, i + nz, axp);
        if (ix > 0) t.emplace_back(i, i - nz, axm);
      }
      if (nz > 1) {
        const Complex szc = sz.at(iz);
        const Complex azp = 1.0 / (szc * sz.at(iz + 0.5) * h2);
        const Complex azm = 1.0 / (szc * sz.at(iz - 0.5) * h2);
        diag -= azp + azm;
        if (iz + 1 < nz) t.emplace_back(i, i + 1, azp);
        if (iz > 0) t.emplace_back(i, i - 1, azm);
      }
      t.emplace_back(i, i, diag);
    }
  }
  op.laplacian_ = SpMatC(n, n);
  op.laplacian_.setFromTriplets(t.begin(), t.end());

  SpMatC mass(n, n);
  mass.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int i = 0; i < n; ++i)
    mass.insert(i, i) = Complex(op.omega_ * op.omega_ * m.values[i], 0.0);
  mass.makeCompressed();
  op.matrix_ = op.laplacian_ + mass;
  op.matrix_.makeCompressed();
  return op;
}

VectorXcd point_source(const ModelGrid& grid, int cell, Complex amplitude) {
  if (cell < 0 || cell >= grid.cell_count()) throw ConfigError("source cell out of range");
  VectorXcd b = VectorXcd::Zero(grid.cell_count());
  const double cell_volume = grid.is_1d() ? grid.spacing : grid.spacing * grid.spacing;
  b[cell] = amplitude / cell_volume;
  return b;
}

VectorXcd build_L(const Wavefield& u, double omega) {
  return (omega * omega) * u.values;
}

double ricker_spectrum(double frequency_hz, double f0_hz) {
  if (!(f0_hz > 0.0)) throw ConfigError("ricker peak frequency must be positive");
  const double f2 = frequency_hz * frequency_hz;
  return 2.0 * f2 / (std::sqrt(kPi) * f0_hz * f0_hz * f0_hz) * std::exp(-f2 / (f0_hz * f0_hz));
}

struct ForwardSolver::Impl {
  SpMatC matrix;
  Eigen::SparseLU<SpMatC> lu;
  double frequency_hz = 0.0;
  ModelGrid grid;
};

ForwardSolver::ForwardSolver(const HelmholtzOperator& op) : impl_(new Impl) {
  impl_->matrix = op.matrix();
  impl_->frequency_hz = op.frequency_hz();
  impl_->grid = op.grid();
  impl_->lu.compute(impl_->matrix);
  if (impl_->lu.info() != Eigen::Success)
    throw NumericalError("helmholtz factorization failed (singular operator?)");
}

ForwardSolver::~ForwardSolver() = default;
ForwardSolver::ForwardSolver(ForwardSolver&&) noexcept = default;

VectorXcd ForwardSolver::solve(const VectorXcd& b) const {
  if (b.size() != impl_->matrix.rows()) throw ConfigError("rhs size does not match operator");
  const double bn = b.norm();
  if (bn == 0.0) return VectorXcd::Zero(b.size());
  VectorXcd u = impl_->lu.solve(b);
  VectorXcd r = b - impl_->matrix * u;
  if (r.norm() > 1e-13 * bn) {
    u += impl_->lu.solve(r);
    r = b - impl_->matrix * u;
  }
  if (!(r.norm() <= 1e-10 * bn))
    throw NumericalError("helmholtz solve residual above tolerance");
  return u;
}

Wavefield forward_solve(const HelmholtzOperator& op, const VectorXcd& b) {
  ForwardSolver solver(op);
  Wavefield w;
  w.grid = op.grid();
  w.frequency_hz = op.frequency_hz();
  w.values = solver.solve(b);
  return w;
}

VectorXcd sample(const Wavefield& u, const Acquisition& acq) {
  VectorXcd d(acq.num_receivers());
  for (int r = 0; r < acq.num_receivers(); ++r) d[r] = u.values[acq.receiver_cells[r]];
  return d;
}

VectorXcd sample_adjoint(const ModelGrid& grid, const Acquisition& acq, const VectorXcd& r) {
  if (r.size() != acq.num_receivers())
    throw ConfigError("receiver vector size does not match acquisition");
  VectorXcd out = VectorXcd::Zero(grid.cell_count());
  for (int i = 0; i < acq.num_receivers(); ++i) out[acq.receiver_cells[i]] += r[i];
  return out;
}

struct WavefieldReconstructor::Impl {
  SpMatC matrix;   // A
  SpMatC normal;   // ratio P^T P + A^H A
  Eigen::SimplicialLDLT<SpMatC, Eigen::Lower> ldlt;
  Acquisition acq;
  ModelGrid grid;
  double frequency_hz = 0.0;
  double ratio = 0.0;

  VectorXcd rhs_of(const VectorXcd& d_aug, const VectorXcd& b_aug) const {
    VectorXcd rhs = matrix.adjoint() * b_aug;
    rhs += ratio * sample_adjoint(grid, acq, d_aug);
    return rhs;
  }
};

WavefieldReconstructor::WavefieldReconstructor(const HelmholtzOperator& op,
                                               const Acquisition& acq, double lambda,
                                               double gamma)
    : impl_(new Impl) {
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
  acq.validate(op.grid());
  impl_->matrix = op.matrix();
  impl_->acq = acq;
  impl_->grid = op.grid();
  impl_->frequency_hz = op.frequency_hz();
  impl_->ratio = lambda / gamma;

  const int n = op.grid().cell_count();
  SpMatC normal = SpMatC(impl_->matrix.adjoint()) * impl_->matrix;
  SpMatC ptp(n, n);
  ptp.reserve(Eigen::VectorXi::Constant(n, 1));
  VectorXd counts = VectorXd::Zero(n);
  for (int c : acq.receiver_cells) counts[c] += 1.0;
  for (int i = 0; i < n; ++i)
    if (counts[i] > 0.0) ptp.insert(i, i) = Complex(impl_->ratio * counts[i], 0.0);
  ptp.makeCompressed();
  normal += ptp;
  normal.makeCompressed();
  impl_->normal = normal;
  impl_->ldlt.compute(normal);
  if (impl_->ldlt.info() != Eigen::Success)
    throw NumericalError("wavefield reconstruction factorization failed");
}

WavefieldReconstructor::~WavefieldReconstructor() = default;
WavefieldReconstructor::WavefieldReconstructor(WavefieldReconstructor&&) noexcept = default;

Wavefield WavefieldReconstructor::solve(const VectorXcd& d_aug, const VectorXcd& b_aug) const {
  if (b_aug.size() != impl_->grid.cell_count())
    throw ConfigError("b_aug size does not match grid");
  const VectorXcd rhs = impl_->rhs_of(d_aug, b_aug);
  Wavefield w;
  w.grid = impl_->grid;
  w.frequency_hz = impl_->frequency_hz;
  const double rn = rhs.norm();
  if (rn == 0.0) {
    w.values = VectorXcd::Zero(rhs.size());
    return w;
  }
  VectorXcd u = impl_->ldlt.solve(rhs);
  double rel = 0.0;
  for (int pass = 0; pass < 4; ++pass) {
    const VectorXcd res = rhs - impl_->normal.selfadjointView<Eigen::Lower>() * u;
    rel = res.norm() / rn;
    if (rel <= 1e-12) break;
    u += impl_->ldlt.solve(res);
  }
  if (!(rel <= 1e-9))
    throw NumericalError("wavefield reconstruction stationarity residual " +
                         std::to_string(rel) + " above tolerance");
  w.values = std::move(u);
  return w;
}

double WavefieldReconstructor::stationarity_residual(const Wavefield& u,
                                                     const VectorXcd& d_aug,
                                                     const VectorXcd& b_aug) const {
  const VectorXcd rhs = impl_->rhs_of(d_aug, b_aug);
  const VectorXcd res = rhs - impl_->normal.selfadjointView<Eigen::Lower>() * u.values;
  const double rn = rhs.norm();
  return rn == 0.0 ? res.norm() : res.norm() / rn;
}

Wavefield reconstruct_wavefield(const HelmholtzOperator& op, const Acquisition& acq,
                                const VectorXcd& d_aug, const VectorXcd& b_aug,
                                double lambda, double gamma) {
  WavefieldReconstructor rec(op, acq, lambda, gamma);
  return rec.solve(d_aug, b_aug);
}

bool DataSet::has_frequency(double frequency_hz) const {
  return std::find(frequencies.begin(), frequencies.end(), frequency_hz) != frequencies.end();
}

const VectorXcd& DataSet::at(double frequency_hz, int source) const {
  auto it = std::find(frequencies.begin(), frequencies.end(), frequency_hz);
  if (it == frequencies.end()) {
    std::ostringstream msg;
    msg << "no observed data for frequency " << frequency_hz << " Hz";
    throw ConfigError(msg.str());
  }
  const auto fi = static_cast<size_t>(it - frequencies.begin());
  if (source < 0 || source >= num_sources) throw ConfigError("source index out of range");
  return values[fi][static_cast<size_t>(source)];
}

}  // namespace pwfwi
