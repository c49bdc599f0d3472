#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qheat {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex imag_unit{0.0, 1.0};

/// Error categories surfaced by the library. Everything throws qheat::Error
/// so callers can branch on the code instead of parsing messages.
enum class Errc {
    invalid_config,
    degenerate_basis,
    zero_frequency,
    no_coupling,
    nonphysical_input,
    step_failure,
    ambiguous_steady_state,
    non_convergent,
    idle_mode,
    no_root,
    schema_error,
    io_error,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Column-stacking vectorization; all superoperators use this convention.
inline Vector vectorize(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix devectorize(const Vector& v, int dim) {
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

inline Matrix hermitized(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline bool is_hermitian(const Matrix& m, double tol = 1e-12) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline double min_eigenvalue(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

/// Rejects density matrices that are not Hermitian, unit-trace and PSD.
/// Slightly negative eigenvalues beyond `psd_tol` are rejected, not repaired.
inline void require_physical_state(const Matrix& rho, double psd_tol = 1e-12,
                                   double trace_tol = 1e-9) {
    if (rho.rows() != rho.cols())
        throw Error(Errc::nonphysical_input, "density matrix must be square");
    if (!is_hermitian(rho, 1e-10))
        throw Error(Errc::nonphysical_input, "density matrix must be Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > trace_tol || std::abs(rho.trace().imag()) > trace_tol)
        throw Error(Errc::nonphysical_input, "density matrix must have unit trace");
    if (min_eigenvalue(hermitized(rho)) < -psd_tol)
        throw Error(Errc::nonphysical_input, "density matrix must be positive semidefinite");
}

inline Matrix ground_projector(int dim) {
    Matrix m = Matrix::Zero(dim, dim);
    m(0, 0) = 1.0;
    return m;
}

}  // namespace qheat
