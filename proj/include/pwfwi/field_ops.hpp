#pragma once

#include "pwfwi/grid.hpp"

namespace pwfwi {

// First and second difference operators on ModelGrid fields.  All stencils
// are unscaled (no 1/h factors); regularizer weights absorb the grid scale.
//
// Conventions:
//   (D_x f)_{ix,iz}  = f_{ix,iz} - f_{ix-1,iz}      (0 when ix == 0)
//   (D_xx f)_{ix,iz} = f_{ix-1,iz} - 2 f_{ix,iz} + f_{ix+1,iz}
//                                                    (0 at the x borders)
//   (D_xz f)        = D_x (D_z f)                    (0 where neighbors missing)
// and symmetrically in z.  On 1D grids (nz == 1) all z components are zero.
//
// The second-difference triple uses the weighted inner product
//   <a, b> = sum axx*bxx + 2 axz*bxz + azz*bzz
// so that |D2 f|^2 matches the symmetric-Hessian Frobenius norm; adjoints and
// Gram matrices below are taken with respect to that weighting.

GradField grad_forward(const ScalarField& f);
ScalarField grad_adjoint(const GradField& g);

HessField second_diff(const ScalarField& f, bool mixed = false);
ScalarField second_diff_adjoint(const HessField& h);

// Pointwise group magnitudes: sqrt(x^2 + z^2) and sqrt(xx^2 + 2 xz^2 + zz^2)
// (the mixed term only when the field carries it).
VectorXd magnitude(const GradField& g);
VectorXd magnitude(const HessField& h);

// Sparse matrix forms of the same stencils (n x n, z-fastest ordering).
SpMat grad_matrix_x(const ModelGrid& grid);
SpMat grad_matrix_z(const ModelGrid& grid);
SpMat hess_matrix_xx(const ModelGrid& grid);
SpMat hess_matrix_xz(const ModelGrid& grid);
SpMat hess_matrix_zz(const ModelGrid& grid);

// Gram matrices D^T D of the stacked operators, with the mixed term
// double-counted as in the inner product above.
SpMat grad_gram(const ModelGrid& grid);
SpMat hess_gram(const ModelGrid& grid, bool include_mixed);

}  // namespace pwfwi
