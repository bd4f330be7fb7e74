#include "straddle/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "straddle/random.hpp"

namespace straddle {

Matrix random_unitary(int dim, Rng& rng) {
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_gaussian();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        cx rjj = r(j, j);
        cx phase = std::abs(rjj) > 0 ? rjj / std::abs(rjj) : cx(1, 0);
        q.col(j) *= phase;
    }
    return q;
}

Vector random_state_vector(int dim, Rng& rng) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = rng.complex_gaussian();
    v /= v.norm();
    return v;
}

namespace linalg {

namespace {

// Deterministic orthonormal basis of the row space spanned by `rows`,
// built by Gram-Schmidt over projected canonical basis vectors so that a
// degenerate subspace always yields the same, sparsest representatives.
// Rows hold v_i^dag; work with the column vectors v_i.
Matrix canonical_rowspace_basis(const Matrix& rows) {
    const int g = static_cast<int>(rows.rows());
    const int dim = static_cast<int>(rows.cols());
    std::vector<Vector> basis;
    for (int c = 0; c < dim && static_cast<int>(basis.size()) < g; ++c) {
        Vector proj = Vector::Zero(dim);
        for (int i = 0; i < g; ++i) proj += rows.row(i).adjoint() * rows(i, c);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) proj -= b * (b.adjoint() * proj)(0);
        double nrm = proj.norm();
        if (nrm > 1e-8) basis.push_back(proj / nrm);
    }
    Matrix out(g, dim);
    for (int i = 0; i < g; ++i) {
        if (i < static_cast<int>(basis.size()))
            out.row(i) = basis[i].adjoint();
        else
            out.row(i) = rows.row(i);
    }
    return out;
}

void canonicalize_degenerate(const Matrix& m, Matrix& u, RealVector& s, Matrix& vdag,
                             const Tolerances& tol) {
    const int k = static_cast<int>(s.size());
    int i = 0;
    while (i < k) {
        int j = i + 1;
        while (j < k && std::abs(s(j - 1) - s(j)) <= tol.degeneracy) ++j;
        if (j - i > 1 && s(i) > tol.rank_cutoff) {
            Matrix rows = vdag.middleRows(i, j - i);
            Matrix canon = canonical_rowspace_basis(rows);
            Matrix old_u = u.middleCols(i, j - i);
            Matrix old_v = rows;
            vdag.middleRows(i, j - i) = canon;
            for (int r = i; r < j; ++r) {
                Vector v = vdag.row(r).conjugate().transpose();
                u.col(r) = m * v / s(r);
            }
            // keep the rotation only if it did not degrade the factorization
            Matrix recon_err = u.middleCols(i, j - i) * s.segment(i, j - i).asDiagonal() *
                               vdag.middleRows(i, j - i);
            Matrix ref = old_u * s.segment(i, j - i).asDiagonal() * old_v;
            if (!(recon_err - ref).allFinite() ||
                (recon_err - ref).cwiseAbs().maxCoeff() > 1e-9) {
                u.middleCols(i, j - i) = old_u;
                vdag.middleRows(i, j - i) = old_v;
            }
        }
        i = j;
    }
}

}  // namespace

SvdResult svd(const Matrix& m, const Tolerances& tol) {
    if (!m.allFinite()) throw InvalidInput("svd: non-finite entries");
    if (m.rows() == 0 || m.cols() == 0) throw InvalidInput("svd: empty matrix");

    SvdResult res;
    if (m.rows() <= 32 && m.cols() <= 32) {
        Eigen::JacobiSVD<Matrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        res.u = dec.matrixU();
        res.s = dec.singularValues();
        res.vdag = dec.matrixV().adjoint();
    } else {
        Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        res.u = dec.matrixU();
        res.s = dec.singularValues();
        res.vdag = dec.matrixV().adjoint();
    }
    canonicalize_degenerate(m, res.u, res.s, res.vdag, tol);
    return res;
}

CsDecomposition cs_decompose(const Matrix& u, const Tolerances& tol) {
    const int dim = static_cast<int>(u.rows());
    if (dim < 2 || dim % 2 != 0) throw InvalidInput("cs_decompose: dimension must be even");
    require_unitary(u, "cs_decompose", tol.unitarity);
    const int n = dim / 2;

    Matrix q11 = u.topLeftCorner(n, n);
    Matrix q12 = u.topRightCorner(n, n);
    Matrix q21 = u.bottomLeftCorner(n, n);
    Matrix q22 = u.bottomRightCorner(n, n);

    // SVD of the top-left block with singular values ascending, so the
    // ill-conditioned (sin ~ 0) columns end up last.
    SvdResult sv = svd(q11, tol);
    const int k = static_cast<int>(sv.s.size());
    RealVector c(n);
    Matrix u1(n, n), v1(n, n);
    for (int i = 0; i < n; ++i) {
        int src = k - 1 - i;
        c(i) = std::min(1.0, std::max(0.0, sv.s(src)));
        u1.col(i) = sv.u.col(src);
        v1.col(i) = sv.vdag.row(src).conjugate().transpose();
    }

    // q21 v1 = u2 diag(s); columns are orthogonal with norms s_i.  Taking the
    // sines from those norms instead of sqrt(1 - c^2) keeps full precision
    // when c is close to one.
    Matrix w = q21 * v1;
    RealVector s(n);
    for (int i = 0; i < n; ++i) {
        s(i) = std::min(1.0, w.col(i).norm());
        double h = std::hypot(c(i), s(i));
        c(i) /= h;
        s(i) /= h;
    }

    Matrix u2 = Matrix::Zero(n, n);
    std::vector<bool> assigned(n, false);
    for (int i = 0; i < n; ++i) {
        if (s(i) <= 1e-13) continue;
        Vector col = w.col(i);
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < n; ++j)
                if (assigned[j]) col -= u2.col(j) * (u2.col(j).adjoint() * col)(0);
        if (col.norm() <= 1e-14) continue;
        u2.col(i) = col / col.norm();
        assigned[i] = true;
    }
    for (int i = 0; i < n; ++i) {
        if (assigned[i]) continue;
        for (int cb = 0; cb < n; ++cb) {
            Vector cand = Vector::Zero(n);
            cand(cb) = 1.0;
            for (int pass = 0; pass < 2; ++pass)
                for (int j = 0; j < n; ++j)
                    if (assigned[j]) cand -= u2.col(j) * (u2.col(j).adjoint() * cand)(0);
            if (cand.norm() > 1e-6) {
                u2.col(i) = cand / cand.norm();
                assigned[i] = true;
                break;
            }
        }
        if (!assigned[i]) throw VerificationFailure("cs_decompose: completion failed");
    }

    // Right factors row by row from whichever channel is better conditioned.
    Matrix a = u2.adjoint() * q22;   // = C v2dag
    Matrix b = u1.adjoint() * q12;   // = -S v2dag
    Matrix v2dag(n, n);
    for (int i = 0; i < n; ++i) {
        if (c(i) >= s(i))
            v2dag.row(i) = a.row(i) / c(i);
        else
            v2dag.row(i) = -b.row(i) / s(i);
    }

    CsDecomposition out;
    out.l1 = u1;
    out.l2 = u2;
    out.r1 = v1.adjoint();
    out.r2 = v2dag;
    out.theta.resize(n);
    for (int i = 0; i < n; ++i) out.theta(i) = std::atan2(s(i), c(i));

    // reconstruction check
    Matrix recon(dim, dim);
    Matrix cs = Matrix::Zero(dim, dim);
    for (int i = 0; i < n; ++i) {
        cs(i, i) = c(i);
        cs(i, n + i) = -s(i);
        cs(n + i, i) = s(i);
        cs(n + i, n + i) = c(i);
    }
    Matrix left = Matrix::Zero(dim, dim);
    left.topLeftCorner(n, n) = out.l1;
    left.bottomRightCorner(n, n) = out.l2;
    Matrix right = Matrix::Zero(dim, dim);
    right.topLeftCorner(n, n) = out.r1;
    right.bottomRightCorner(n, n) = out.r2;
    recon = left * cs * right;
    if ((recon - u).cwiseAbs().maxCoeff() > tol.reconstruction)
        throw VerificationFailure("cs_decompose: reconstruction exceeded tolerance");
    return out;
}

Demultiplexed demultiplex(const Matrix& u1, const Matrix& u2, const Tolerances& tol) {
    if (u1.rows() != u2.rows() || u1.cols() != u2.cols())
        throw InvalidInput("demultiplex: size mismatch");
    require_unitary(u1, "demultiplex u1", tol.unitarity);
    require_unitary(u2, "demultiplex u2", tol.unitarity);
    const int n = static_cast<int>(u1.rows());

    Matrix x = u1 * u2.adjoint();
    Eigen::ComplexSchur<Matrix> schur(x);
    Matrix v = schur.matrixU();
    Vector lambda(n);
    for (int i = 0; i < n; ++i) {
        cx t = schur.matrixT()(i, i);
        lambda(i) = std::abs(t) > 0 ? t / std::abs(t) : cx(1, 0);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::arg(lambda(a)) < std::arg(lambda(b));
    });

    Demultiplexed out;
    out.v.resize(n, n);
    out.d.resize(n);
    for (int i = 0; i < n; ++i) {
        out.v.col(i) = v.col(order[i]);
        double half = std::arg(lambda(order[i])) / 2.0;
        out.d(i) = cx(std::cos(half), std::sin(half));
    }
    out.w = out.d.asDiagonal() * out.v.adjoint() * u2;

    Matrix recon = out.v * out.d.asDiagonal() * out.w;
    if ((recon - u1).cwiseAbs().maxCoeff() > 1e-9)
        throw VerificationFailure("demultiplex: reconstruction exceeded tolerance");
    return out;
}

Matrix complete_basis(const std::vector<Vector>& columns, int dim, const Tolerances& tol) {
    const int k = static_cast<int>(columns.size());
    if (dim <= 0) throw InvalidInput("complete_basis: bad dimension");
    if (k > dim) throw InvalidInput("complete_basis: more columns than dimension");
    for (const auto& c : columns) {
        if (c.size() != dim) throw InvalidInput("complete_basis: column size mismatch");
        if (!c.allFinite()) throw InvalidInput("complete_basis: non-finite column");
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j <= i; ++j) {
            cx ip = (columns[j].adjoint() * columns[i])(0);
            double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(ip - cx(want, 0)) > tol.orthonormality)
                throw InvalidInput("complete_basis: input columns not orthonormal");
        }

    Matrix out(dim, dim);
    for (int i = 0; i < k; ++i) {
        Vector c = columns[i];
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < i; ++j) c -= out.col(j) * (out.col(j).adjoint() * c)(0);
        out.col(i) = c / c.norm();
    }
    int have = k;
    for (int cb = 0; cb < dim && have < dim; ++cb) {
        Vector cand = Vector::Zero(dim);
        cand(cb) = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < have; ++j) cand -= out.col(j) * (out.col(j).adjoint() * cand)(0);
        if (cand.norm() > 1e-6) out.col(have++) = cand / cand.norm();
    }
    if (have < dim) throw VerificationFailure("complete_basis: completion failed");
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix expi_hermitian(const Matrix& h) {
    Matrix hh = (h + h.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hh);
    const int n = static_cast<int>(h.rows());
    Vector phases(n);
    for (int i = 0; i < n; ++i) {
        double w = es.eigenvalues()(i);
        phases(i) = cx(std::cos(w), std::sin(w));
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace linalg
}  // namespace straddle
