#pragma once

#include <vector>

#include "straddle/types.hpp"

namespace straddle {
namespace linalg {

struct SvdResult {
    Matrix u;         // full, square
    RealVector s;     // descending, non-negative
    Matrix vdag;      // full, square
};

// Full SVD with deterministic handling of degenerate singular values: inside a
// degenerate group the right-singular vectors are re-derived by Gram-Schmidt
// over projected canonical basis vectors (lowest index first), so repeated
// spectra still give reproducible, maximally sparse factors.
SvdResult svd(const Matrix& m, const Tolerances& tol = default_tol());

struct CsDecomposition {
    Matrix l1, l2;          // left block-diagonal factors
    RealVector theta;       // angles in [0, pi/2]
    Matrix r1, r2;          // right block-diagonal factors
};

// Cosine-sine decomposition of a 2N x 2N unitary split into N x N blocks:
//   U = (l1 (+) l2) . [[C, -S], [S, C]] . (r1 (+) r2)
// with C = diag(cos theta), S = diag(sin theta).
CsDecomposition cs_decompose(const Matrix& u, const Tolerances& tol = default_tol());

struct Demultiplexed {
    Matrix v;
    Vector d;     // unit-modulus diagonal
    Matrix w;
};

// Factor a pair of same-size unitaries as u1 = v diag(d) w, u2 = v diag(d)* w.
// Eigenphases of u1 u2^dag are sorted ascending in (-pi, pi].
Demultiplexed demultiplex(const Matrix& u1, const Matrix& u2,
                          const Tolerances& tol = default_tol());

// Extend k orthonormal columns to a full dim x dim unitary whose first k
// columns are the inputs (after re-orthonormalization to 1e-12).  Completion
// uses Gram-Schmidt over canonical basis vectors, so it is deterministic.
Matrix complete_basis(const std::vector<Vector>& columns, int dim,
                      const Tolerances& tol = default_tol());

// exp(iH) for Hermitian H, via spectral decomposition.
Matrix expi_hermitian(const Matrix& h);

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace linalg
}  // namespace straddle
