#include "pwfwi/field_ops.hpp"

#include <vector>

namespace pwfwi {

namespace {

void require_nx(const ModelGrid& g, int min_nx, const char* op) {
  if (g.nx < min_nx)
    throw ConfigError(std::string(op) + " requires nx >= " + std::to_string(min_nx) +
                      " (got nx=" + std::to_string(g.nx) + ")");
}

}  // namespace

GradField grad_forward(const ScalarField& f) {
  require_nx(f.grid, 2, "grad_forward");
  const int nx = f.grid.nx, nz = f.grid.nz;
  GradField out(f.grid);
  for (int ix = 1; ix < nx; ++ix)
    for (int iz = 0; iz < nz; ++iz) {
      const int i = ix * nz + iz;
      out.x[i] = f.values[i] - f.values[i - nz];
    }
  for (int ix = 0; ix < nx; ++ix)
    for (int iz = 1; iz < nz; ++iz) {
      const int i = ix * nz + iz;
      out.z[i] = f.values[i] - f.values[i - 1];
    }
  return out;
}

ScalarField grad_adjoint(const GradField& g) {
  require_nx(g.grid, 2, "grad_adjoint");
  const int nx = g.grid.nx, nz = g.grid.nz;
  ScalarField out = ScalarField::zeros(g.grid);
  for (int ix = 1; ix < nx; ++ix)
    for (int iz = 0; iz < nz; ++iz) {
      const int i = ix * nz + iz;
      out.values[i] += g.x[i];
      out.values[i - nz] -= g.x[i];
    }
  for (int ix = 0; ix < nx; ++ix)
    for (int iz = 1; iz < nz; ++iz) {
      const int i = ix * nz + iz;
      out.values[i] += g.z[i];
      out.values[i - 1] -= g.z[i];
    }
  return out;
}

HessField second_diff(const ScalarField& f, bool mixed) {
  require_nx(f.grid, 3, "second_diff");
  if (f.grid.nz == 2)
    throw ConfigError("second_diff requires nz == 1 or nz >= 3");
  const int nx = f.grid.nx, nz = f.grid.nz;
  HessField out(f.grid, mixed);
  for (int ix = 1; ix + 1 < nx; ++ix)
    for (int iz = 0; iz < nz; ++iz) {
      const int i = ix * nz + iz;
      out.xx[i] = f.values[i - nz] - 2.0 * f.values[i] + f.values[i + nz];
    }
  for (int ix = 0; ix < nx; ++ix)
    for (int iz = 1; iz + 1 < nz; ++iz) {
      const int i = ix * nz + iz;
      out.zz[i] = f.values[i - 1] - 2.0 * f.values[i] + f.values[i + 1];
    }
  if (mixed)
    for (int ix = 1; ix < nx; ++ix)
      for (int iz = 1; iz < nz; ++iz) {
        const int i = ix * nz + iz;
        out.xz[i] = f.values[i] - f.values[i - nz] - f.values[i - 1] + f.values[i - nz - 1];
      }
  return out;
}

ScalarField second_diff_adjoint(const HessField& h) {
  require_nx(h.grid, 3, "second_diff_adjoint");
  const int nx = h.grid.nx, nz = h.grid.nz;
  ScalarField out = ScalarField::zeros(h.grid);
  for (int ix = 1; ix + 1 < nx; ++ix)
    for (int iz = 0; iz < nz; ++iz) {
      const int i = ix * nz + iz;
      const double v = h.xx[i];
      out.values[i - nz] += v;
      out.values[i] -= 2.0 * v;
      out.values[i + nz] += v;
    }
  for (int ix = 0; ix < nx; ++ix)
    for (int iz = 1; iz + 1 < nz; ++iz) {
      const int i = ix * nz + iz;
      const double v = h.zz[i];
      out.values[i - 1] += v;
      out.values[i] -= 2.0 * v;
      out.values[i + 1] += v;
    }
  if (h.mixed) {
    // Weight 2 = the xz + zx pair of the symmetric second-difference triple.
    for (int ix = 1; ix < nx; ++ix)
      for (int iz = 1; iz < nz; ++iz) {
        const int i = ix * nz + iz;
        const double v = 2.0 * h.xz[i];
        out.values[i] += v;
        out.values[i - nz] -= v;
        out.values[i - 1] -= v;
        out.values[i - nz - 1] += v;
      }
  }
  return out;
}

VectorXd magnitude(const GradField& g) {
  return (g.x.array().square() + g.z.array().square()).sqrt();
}

VectorXd magnitude(const HessField& h) {
  Eigen::ArrayXd s = h.xx.array().square() + h.zz.array().square();
  if (h.mixed) s += 2.0 * h.xz.array().square();
  return s.sqrt();
}

SpMat grad_matrix_x(const ModelGrid& grid) {
  const int nx = grid.nx, nz = grid.nz, n = grid.cell_count();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * n);
  for (int ix = 1; ix < nx; ++ix)
    for (int iz = 0; iz < nz; ++iz) {
      const int i = ix * nz + iz;
      t.emplace_back(i, i, 1.0);
      t.emplace_back(i, i - nz, -1.0);
    }
  SpMat m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat grad_matrix_z(const ModelGrid& grid) {
  const int nx = grid.nx, nz = grid.nz, n = grid.cell_count();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * n);
  for (int ix = 0; ix < nx; ++ix)
    for (int iz = 1; iz < nz; ++iz) {
      const int i = ix * nz + iz;
      t.emplace_back(i, i, 1.0);
      t.emplace_back(i, i - 1, -1.0);
    }
  SpMat m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat hess_matrix_xx(const ModelGrid& grid) {
  const int nx = grid.nx, nz = grid.nz, n = grid.cell_count();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(3 * n);
  for (int ix = 1; ix + 1 < nx; ++ix)
    for (int iz = 0; iz < nz; ++iz) {
      const int i = ix * nz + iz;
      t.emplace_back(i, i - nz, 1.0);
      t.emplace_back(i, i, -2.0);
      t.emplace_back(i, i + nz, 1.0);
    }
  SpMat m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat hess_matrix_zz(const ModelGrid& grid) {
  const int nx = grid.nx, nz = grid.nz, n = grid.cell_count();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(3 * n);
  for (int ix = 0; ix < nx; ++ix)
    for (int iz = 1; iz + 1 < nz; ++iz) {
      const int i = ix * nz + iz;
      t.emplace_back(i, i - 1, 1.0);
      t.emplace_back(i, i, -2.0);
      t.emplace_back(i, i + 1, 1.0);
    }
  SpMat m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat hess_matrix_xz(const ModelGrid& grid) {
  const int nx = grid.nx, nz = grid.nz, n = grid.cell_count();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 * n);
  for (int ix = 1; ix < nx; ++ix)
    for (int iz = 1; iz < nz; ++iz) {
      const int i = ix * nz + iz;
      t.emplace_back(i, i, 1.0);
      t.emplace_back(i, i - nz, -1.0);
      t.emplace_back(i, i - 1, -1.0);
      t.emplace_back(i, i - nz - 1, 1.0);
    }
  SpMat m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat grad_gram(const ModelGrid& grid) {
  SpMat dx = grad_matrix_x(grid);
  SpMat dz = grad_matrix_z(grid);
  SpMat g = SpMat(dx.transpose()) * dx;
  g += SpMat(dz.transpose()) * dz;
  return g;
}

SpMat hess_gram(const ModelGrid& grid, bool include_mixed) {
  SpMat dxx = hess_matrix_xx(grid);
  SpMat dzz = hess_matrix_zz(grid);
  SpMat g = SpMat(dxx.transpose()) * dxx;
  g += SpMat(dzz.transpose()) * dzz;
  if (include_mixed && grid.nz > 1) {
    SpMat dxz = hess_matrix_xz(grid);
    g += 2.0 * (SpMat(dxz.transpose()) * dxz);
  }
  return g;
}

}  // namespace pwfwi
