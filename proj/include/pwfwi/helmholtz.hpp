#pragma once

#include <memory>
#include <vector>

#include "pwfwi/grid.hpp"

namespace pwfwi {

// Absorbing layer occupying `width` cells on every open side of the grid
// (both x borders, and both z borders on 2D grids).  The damping profile is
// quadratic in depth and sized so the theoretical normal-incidence
// reflection equals reflection_target.
struct PmlSpec {
  int width = 10;
  double reflection_target = 1e-3;

  void validate() const {
    if (width != 0 && width < 2) throw ConfigError("pml width must be 0 or >= 2");
    if (!(reflection_target > 0.0 && reflection_target < 1.0))
      throw ConfigError("pml reflection target must lie in (0, 1)");
  }
};

// Source and receiver cells (flat z-fastest indices).  source_amplitudes may
// be empty (all ones) or one complex amplitude per source.
struct Acquisition {
  std::vector<int> source_cells;
  std::vector<Complex> source_amplitudes;
  std::vector<int> receiver_cells;

  int num_sources() const { return static_cast<int>(source_cells.size()); }
  int num_receivers() const { return static_cast<int>(receiver_cells.size()); }
  Complex amplitude(int s) const {
    return source_amplitudes.empty() ? Complex(1.0, 0.0) : source_amplitudes[s];
  }
  void validate(const ModelGrid& grid) const;
};

struct Wavefield {
  ModelGrid grid;
  VectorXcd values;
  double frequency_hz = 0.0;
  int source_index = -1;
};

// Discrete Helmholtz operator A(m) = L_pml + omega^2 diag(m) on squared
// slowness m, with 3-point (1D) / 5-point (2D) stencils and complex
// coordinate stretching s = 1 + i sigma/omega inside the PML bands.
class HelmholtzOperator {
public:
  static HelmholtzOperator assemble(const ScalarField& m, double frequency_hz,
                                    const PmlSpec& pml);

  const SpMatC& matrix() const { return matrix_; }
  const SpMatC& laplacian() const { return laplacian_; }
  const ModelGrid& grid() const { return grid_; }
  double frequency_hz() const { return frequency_hz_; }
  double omega() const { return omega_; }
  const PmlSpec& pml() const { return pml_; }

private:
  ModelGrid grid_;
  double frequency_hz_ = 0.0;
  double omega_ = 0.0;
  PmlSpec pml_;
  SpMatC laplacian_;
  SpMatC matrix_;
};

// Discrete delta at `cell` scaled by 1/h (1D) or 1/h^2 (2D), so solutions
// approximate the continuum Green's function response.
VectorXcd point_source(const ModelGrid& grid, int cell, Complex amplitude);

// Ricker wavelet amplitude spectrum R(f) = 2 f^2 / (sqrt(pi) f0^3) exp(-f^2/f0^2).
double ricker_spectrum(double frequency_hz, double f0_hz);

// Diagonal of the model-linearization operator L = dA(m)/dm u = omega^2 u,
// so that A(m) u = L_pml u + diag(build_L(u)) m identically.
VectorXcd build_L(const Wavefield& u, double omega);

// Direct solve A u = b (sparse LU, one refinement pass); relative residual
// above 1e-10 raises NumericalError.
class ForwardSolver {
public:
  explicit ForwardSolver(const HelmholtzOperator& op);
  ~ForwardSolver();
  ForwardSolver(ForwardSolver&&) noexcept;
  VectorXcd solve(const VectorXcd& b) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Wavefield forward_solve(const HelmholtzOperator& op, const VectorXcd& b);

// Receiver sampling P u and its adjoint (duplicate receiver cells accumulate).
VectorXcd sample(const Wavefield& u, const Acquisition& acq);
VectorXcd sample_adjoint(const ModelGrid& grid, const Acquisition& acq, const VectorXcd& r);

// Penalized wavefield reconstruction: minimizes
//   (lambda/gamma) |P u - d_aug|^2 + |A u - b_aug|^2
// through its normal equations
//   ((lambda/gamma) P^T P + A^H A) u = (lambda/gamma) P^T d_aug + A^H b_aug.
// The Hermitian factorization is cached, so one instance serves every source
// of a (model, frequency) pair.  Solutions are refined until the relative
// stationarity residual drops below 1e-9.
class WavefieldReconstructor {
public:
  WavefieldReconstructor(const HelmholtzOperator& op, const Acquisition& acq,
                         double lambda, double gamma);
  ~WavefieldReconstructor();
  WavefieldReconstructor(WavefieldReconstructor&&) noexcept;

  Wavefield solve(const VectorXcd& d_aug, const VectorXcd& b_aug) const;
  // Relative norm of the normal-equation residual at u (diagnostic).
  double stationarity_residual(const Wavefield& u, const VectorXcd& d_aug,
                               const VectorXcd& b_aug) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Wavefield reconstruct_wavefield(const HelmholtzOperator& op, const Acquisition& acq,
                                const VectorXcd& d_aug, const VectorXcd& b_aug,
                                double lambda, double gamma);

// Observed data indexed by (frequency, source); receiver order follows the
// acquisition.  Frequencies are kept sorted ascending.
struct DataSet {
  std::vector<double> frequencies;
  int num_sources = 0;
  int num_receivers = 0;
  std::vector<std::vector<VectorXcd>> values;  // [frequency][source]

  const VectorXcd& at(double frequency_hz, int source) const;
  bool has_frequency(double frequency_hz) const;
};

}  // namespace pwfwi
