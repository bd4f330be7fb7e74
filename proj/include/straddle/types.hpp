#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace straddle {

using cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Central tolerance record.  Every module reads from here so the numerical
// contract lives in one place.
struct Tolerances {
    double unitarity = 1e-10;
    double orthonormality = 1e-8;
    double rank_cutoff = 1e-9;
    double reconstruction = 1e-10;
    double fidelity_gap = 1e-8;      // synthesis must reach 1 - fidelity_gap
    double angle_zero = 1e-11;       // rotations below this count as identity
    double degeneracy = 1e-9;        // spectral gap below this is a tie
};

inline const Tolerances& default_tol() {
    static const Tolerances t{};
    return t;
}

struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& msg) : std::runtime_error(msg) {}
};

struct ResourceLimit : std::runtime_error {
    explicit ResourceLimit(const std::string& msg) : std::runtime_error(msg) {}
};

struct VerificationFailure : std::runtime_error {
    explicit VerificationFailure(const std::string& msg) : std::runtime_error(msg) {}
};

inline bool is_finite(const Matrix& m) { return m.allFinite(); }

inline double unitarity_error(const Matrix& m) {
    if (m.rows() != m.cols()) return 1e300;
    return (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

inline bool is_unitary(const Matrix& m, double tol = default_tol().unitarity) {
    return m.allFinite() && m.rows() == m.cols() && unitarity_error(m) <= tol;
}

inline void require_unitary(const Matrix& m, const std::string& what,
                            double tol = default_tol().unitarity) {
    if (!m.allFinite()) throw InvalidInput(what + ": non-finite entries");
    if (m.rows() != m.cols()) throw InvalidInput(what + ": not square");
    if (unitarity_error(m) > tol) throw InvalidInput(what + ": not unitary within tolerance");
}

}  // namespace straddle
