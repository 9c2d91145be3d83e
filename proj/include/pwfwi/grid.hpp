#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>

#include "pwfwi/errors.hpp"

namespace pwfwi {

using Complex = std::complex<double>;
using SpMat = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<Complex>;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Regular 2D grid of cell centers with uniform spacing in meters.  A 1D
// profile is represented as nz == 1 with the profile varying along x.
// Storage order everywhere is z-fastest: flat index = ix * nz + iz.
struct ModelGrid {
  int nx = 0;
  int nz = 1;
  double spacing = 0.0;

  ModelGrid() = default;
  ModelGrid(int nx_, int nz_, double spacing_) : nx(nx_), nz(nz_), spacing(spacing_) {
    if (nx < 3 || nz < 1)
      throw ConfigError("grid needs nx >= 3 and nz >= 1 (got nx=" + std::to_string(nx) +
                        ", nz=" + std::to_string(nz) + ")");
    if (!(spacing > 0.0))
      throw ConfigError("grid spacing must be positive");
  }

  int cell_count() const { return nx * nz; }
  int index(int ix, int iz) const { return ix * nz + iz; }
  bool is_1d() const { return nz == 1; }

  bool operator==(const ModelGrid& o) const {
    return nx == o.nx && nz == o.nz && spacing == o.spacing;
  }
  bool operator!=(const ModelGrid& o) const { return !(*this == o); }
};

// Real scalar quantity on a grid (squared slowness, velocity, ...).
struct ScalarField {
  ModelGrid grid;
  VectorXd values;

  ScalarField() = default;
  ScalarField(const ModelGrid& g, VectorXd v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.cell_count())
      throw ConfigError("field size does not match grid");
  }
  static ScalarField zeros(const ModelGrid& g) {
    return ScalarField(g, VectorXd::Zero(g.cell_count()));
  }
  static ScalarField constant(const ModelGrid& g, double c) {
    return ScalarField(g, VectorXd::Constant(g.cell_count(), c));
  }
};

// First-difference pair (x and z components), one value per cell; entries
// whose backward neighbor falls outside the grid are zero by convention.
struct GradField {
  ModelGrid grid;
  VectorXd x;
  VectorXd z;

  GradField() = default;
  explicit GradField(const ModelGrid& g)
      : grid(g), x(VectorXd::Zero(g.cell_count())), z(VectorXd::Zero(g.cell_count())) {}
};

// Second-difference triple (xx, xz, zz) with a flag selecting whether the
// mixed component participates.  The xz values are stored unweighted;
// magnitudes and quadratic forms double-count them to cover the symmetric zx
// term (the sqrt(2) weighting of the stacked operator).
struct HessField {
  ModelGrid grid;
  VectorXd xx;
  VectorXd xz;
  VectorXd zz;
  bool mixed = false;

  HessField() = default;
  explicit HessField(const ModelGrid& g, bool mixed_ = false)
      : grid(g),
        xx(VectorXd::Zero(g.cell_count())),
        xz(VectorXd::Zero(g.cell_count())),
        zz(VectorXd::Zero(g.cell_count())),
        mixed(mixed_) {}
};

}  // namespace pwfwi
