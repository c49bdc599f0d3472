#pragma once

#include "qheat/core.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace qheat {

/// Dipole geometry of the working medium: one ground state, n_levels-1
/// degenerate excited states, each coupled to the ground state by a
/// transition dipole. `alphas(j)` is the relative strength of transition
/// j+1 (alphas(0) == 1 by convention) and `alignment(i,j)` holds the
/// complex overlap p_ij * exp(i*phi_ij) of the unit dipole directions.
struct DipoleConfig {
    int n_levels = 2;
    RealVector alphas;  // size n_levels-1
    Matrix alignment;   // (n_levels-1) x (n_levels-1), Hermitian, unit diagonal

    /// Canonical constructor: derive strengths and alignment from explicit
    /// complex 3-vectors. The first dipole is the reference and must be the
    /// strongest for the config to validate.
    static DipoleConfig from_vectors(const std::vector<Eigen::Vector3cd>& dipoles) {
        const int nt = static_cast<int>(dipoles.size());
        DipoleConfig cfg;
        cfg.n_levels = nt + 1;
        cfg.alphas = RealVector(nt);
        cfg.alignment = Matrix(nt, nt);
        if (nt == 0) return cfg;
        const double ref = dipoles[0].norm();
        for (int j = 0; j < nt; ++j) cfg.alphas(j) = dipoles[j].norm() / ref;
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < nt; ++j)
                cfg.alignment(i, j) =
                    dipoles[i].dot(dipoles[j]) / (dipoles[i].norm() * dipoles[j].norm());
        return cfg;
    }

    /// All dipoles pairwise parallel, strengths `alphas`, phases relative to
    /// the first transition.
    static DipoleConfig parallel(const RealVector& alphas, const RealVector& phases) {
        const int nt = static_cast<int>(alphas.size());
        DipoleConfig cfg;
        cfg.n_levels = nt + 1;
        cfg.alphas = alphas;
        cfg.alignment = Matrix(nt, nt);
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < nt; ++j)
                cfg.alignment(i, j) = std::exp(imag_unit * (phases(j) - phases(i)));
        return cfg;
    }

    static DipoleConfig two_level() {
        DipoleConfig cfg;
        cfg.n_levels = 2;
        cfg.alphas = RealVector::Ones(1);
        cfg.alignment = Matrix::Ones(1, 1);
        return cfg;
    }

    int transitions() const { return n_levels - 1; }

    double sum_alpha_sq() const { return alphas.squaredNorm(); }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Parallelism threshold: |p_ij| >= 1 - kParallelTol counts as aligned.
/// Gram matrices of nominally identical vectors round just below 1.
inline constexpr double kParallelTol = 1e-9;

/// Checks that a config is geometrically realizable: Hermitian unit-diagonal
/// alignment, moduli in [0,1], PSD Gram matrix of rank <= 3 (dipoles live in
/// C^3), transitive parallelism, strengths in (0,1] with alpha_1 = 1.
inline ValidationReport validate_config(const DipoleConfig& cfg) {
    ValidationReport rep;
    auto fail = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

    const int nt = cfg.n_levels - 1;
    if (cfg.n_levels < 2) fail("n_levels must be at least 2");
    if (cfg.alphas.size() != nt || cfg.alignment.rows() != nt || cfg.alignment.cols() != nt) {
        fail("alphas/alignment dimensions inconsistent with n_levels");
        return rep;  // nothing below is meaningful
    }
    if (nt == 0) return rep;

    if (std::abs(cfg.alphas(0) - 1.0) > 1e-12) fail("alpha_1 must equal 1 (reference dipole)");
    for (int j = 0; j < nt; ++j)
        if (!(cfg.alphas(j) > 0.0) || cfg.alphas(j) > 1.0 + 1e-12) {
            std::ostringstream os;
            os << "alpha_" << j + 1 << " = " << cfg.alphas(j) << " outside (0, 1]";
            fail(os.str());
        }

    if ((cfg.alignment - cfg.alignment.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
        fail("alignment matrix is not Hermitian");
    for (int i = 0; i < nt; ++i)
        if (std::abs(cfg.alignment(i, i) - 1.0) > 1e-12) fail("alignment diagonal must be 1");
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nt; ++j)
            if (std::abs(cfg.alignment(i, j)) > 1.0 + 1e-12) {
                std::ostringstream os;
                os << "alignment modulus p_" << i + 1 << j + 1 << " = "
                   << std::abs(cfg.alignment(i, j)) << " outside [0, 1]";
                fail(os.str());
            }

    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitized(cfg.alignment), Eigen::EigenvaluesOnly);
    const RealVector ev = es.eigenvalues();
    const double top = std::max(ev.maxCoeff(), 0.0);
    if (ev.minCoeff() < -1e-9 * std::max(top, 1.0))
        fail("alignment matrix is not positive semidefinite");
    int rank = 0;
    for (int k = 0; k < ev.size(); ++k)
        if (ev(k) > 1e-9 * std::max(top, 1.0)) ++rank;
    if (rank > 3) fail("alignment matrix has rank > 3 (not realizable by 3-vectors)");

    // Transitivity of parallelism; clear violations only, to avoid flagging
    // rounding of genuinely parallel triples.
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nt; ++j)
            for (int k = 0; k < nt; ++k) {
                if (i == j || j == k || i == k) continue;
                if (std::abs(cfg.alignment(i, j)) < 1.0 - kParallelTol) continue;
                if (std::abs(cfg.alignment(j, k)) < 1.0 - kParallelTol) continue;
                if (std::abs(cfg.alignment(i, k)) < 1.0 - 1e-6) {
                    std::ostringstream os;
                    os << "parallelism not transitive for transitions (" << i + 1 << ", "
                       << j + 1 << ", " << k + 1 << ")";
                    fail(os.str());
                    continue;
                }
                const double phase_gap = std::abs(std::arg(cfg.alignment(i, j) *
                                                           cfg.alignment(j, k) *
                                                           std::conj(cfg.alignment(i, k))));
                if (phase_gap > 1e-6) {
                    std::ostringstream os;
                    os << "alignment phases not additive for transitions (" << i + 1 << ", "
                       << j + 1 << ", " << k + 1 << ")";
                    fail(os.str());
                }
            }
    return rep;
}

/// Partition of the transitions into parallel domains. Lone dipoles (not
/// parallel to any other) are stored separately from multi-member domains;
/// n_eff = p + N - N_p is invariant under that bookkeeping choice.
struct DomainDecomposition {
    int n_levels = 2;
    std::vector<std::vector<int>> domains;  // >= 2 members each, 0-based transition indices
    std::vector<int> lone_dipoles;
    int n_eff = 2;
    RealVector couplings;  // A_m, domains first then lone dipoles

    int domain_count() const { return static_cast<int>(domains.size()); }
    int domain_dipole_count() const {
        return std::accumulate(domains.begin(), domains.end(), 0,
                               [](int acc, const auto& d) { return acc + static_cast<int>(d.size()); });
    }
};

inline DomainDecomposition decompose_domains(const DipoleConfig& cfg, double tol = kParallelTol) {
    if (tol <= 0.0) throw Error(Errc::invalid_config, "parallelism tolerance must be positive");
    const ValidationReport rep = validate_config(cfg);
    if (!rep.ok()) {
        std::string msg = "invalid dipole configuration:";
        for (const auto& v : rep.violations) msg += " " + v + ";";
        throw Error(Errc::invalid_config, msg);
    }

    const int nt = cfg.n_levels - 1;
    std::vector<int> root(nt);
    std::iota(root.begin(), root.end(), 0);
    auto find = [&root](int a) {
        while (root[a] != a) a = root[a] = root[root[a]];
        return a;
    };
    for (int i = 0; i < nt; ++i)
        for (int j = i + 1; j < nt; ++j)
            if (std::abs(cfg.alignment(i, j)) >= 1.0 - tol) root[find(j)] = find(i);

    std::vector<std::vector<int>> classes(nt);
    for (int j = 0; j < nt; ++j) classes[find(j)].push_back(j);

    DomainDecomposition dec;
    dec.n_levels = cfg.n_levels;
    std::vector<double> couplings;
    for (const auto& cls : classes) {
        if (cls.size() >= 2) {
            double w = 0.0;
            for (int j : cls) w += cfg.alphas(j) * cfg.alphas(j);
            dec.domains.push_back(cls);
            couplings.push_back(std::sqrt(w));
        }
    }
    for (const auto& cls : classes)
        if (cls.size() == 1) dec.lone_dipoles.push_back(cls.front());
    for (int j : dec.lone_dipoles) couplings.push_back(cfg.alphas(j));

    dec.n_eff = dec.domain_count() + cfg.n_levels - dec.domain_dipole_count();
    dec.couplings = Eigen::Map<const RealVector>(couplings.data(), couplings.size());
    return dec;
}

/// Unitary change of basis: column 0 is the ground state, columns
/// 1..n_eff-1 are the effective transitions in coupling order (one bright
/// state per domain, then the untouched lone excited states), and columns
/// n_eff..N-1 span the dark subspace. The dark completion is Gram-Schmidt
/// seeded with canonical unit vectors in fixed index order, so it is
/// deterministic.
struct CollectiveBasis {
    Matrix u;  // n_levels x n_levels
    int n_eff = 2;
    std::vector<int> dark_indices;

    int dark_count() const { return static_cast<int>(dark_indices.size()); }

    Matrix dark_block_of(const Matrix& rho) const {
        const int nd = dark_count();
        Matrix block(nd, nd);
        for (int a = 0; a < nd; ++a)
            for (int b = 0; b < nd; ++b)
                block(a, b) = (u.col(dark_indices[a]).adjoint() * rho * u.col(dark_indices[b]))(0);
        return block;
    }
};

inline CollectiveBasis build_collective_basis(const DomainDecomposition& dec,
                                              const DipoleConfig& cfg) {
    const int n = cfg.n_levels;
    CollectiveBasis basis;
    basis.n_eff = dec.n_eff;
    basis.u = Matrix::Zero(n, n);
    basis.u(0, 0) = 1.0;

    int col = 1;
    for (std::size_t d = 0; d < dec.domains.size(); ++d) {
        const auto& members = dec.domains[d];
        const int ref = members.front();
        Vector bright = Vector::Zero(n);
        for (int j : members) {
            Complex phase = 1.0;
            if (j != ref) {
                const Complex a = cfg.alignment(ref, j);
                phase = a / std::abs(a);
            }
            bright(j + 1) = cfg.alphas(j) * phase;
        }
        bright /= bright.norm();
        basis.u.col(col++) = bright;
    }
    for (int j : dec.lone_dipoles) basis.u(j + 1, col++) = 1.0;

    // Dark completion by Gram-Schmidt over canonical excited seeds.
    for (int seed = 1; seed < n && col < n; ++seed) {
        Vector v = Vector::Zero(n);
        v(seed) = 1.0;
        for (int k = 0; k < col; ++k) v -= basis.u.col(k) * (basis.u.col(k).adjoint() * v)(0);
        const double norm = v.norm();
        if (norm < 1e-8) continue;
        basis.u.col(col) = v / norm;
        basis.dark_indices.push_back(col);
        ++col;
    }
    if (col != n)
        throw Error(Errc::degenerate_basis,
                    "Gram-Schmidt could not complete the collective basis (inconsistent inputs)");
    if ((basis.u.adjoint() * basis.u - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
        throw Error(Errc::degenerate_basis, "collective basis is not unitary");
    return basis;
}

/// Projector onto the dark subspace; Hermitian idempotent with trace N - n_eff.
inline Matrix dark_projector(const CollectiveBasis& basis) {
    const int n = static_cast<int>(basis.u.rows());
    Matrix proj = Matrix::Zero(n, n);
    for (int k : basis.dark_indices)
        proj += basis.u.col(k) * basis.u.col(k).adjoint();
    return proj;
}

/// Overlap of a state with the dark subspace.
inline double darkness_of(const CollectiveBasis& basis, const Matrix& rho) {
    if (basis.dark_indices.empty()) return 0.0;
    return (dark_projector(basis) * rho).trace().real();
}

}  // namespace qheat
