#pragma once

#include "qheat/core.hpp"
#include "qheat/dynamics.hpp"
#include "qheat/geometry.hpp"
#include "qheat/liouville.hpp"

#include <algorithm>
#include <cmath>

namespace qheat {

/// Closed-form steady state of the three-level system (Appendix-A solution).
/// Branches on aligned (p = 1, initial-condition dependent through the
/// integral of motion) versus misaligned (unique diagonal thermal state).
inline Matrix steady_three_level(const ThreeLevelParams& params, const Matrix& rho0) {
    require_physical_state(rho0);
    const double a = params.alpha;
    const double z = params.boltzmann;
    const double inv_z = 1.0 / z;
    Matrix rho = Matrix::Zero(3, 3);
    if (params.alignment >= 1.0 - kParallelTol) {
        const double i0 = integral_of_motion(params, rho0);
        const Complex r21 = a * std::exp(imag_unit * params.phase) / (1.0 + a * a) *
                            (1.0 - i0 * (2.0 + inv_z)) / (1.0 + inv_z);
        rho(2, 1) = r21;
        rho(1, 2) = std::conj(r21);
        rho(0, 0) = (1.0 - i0) / (1.0 + z);
        rho(2, 2) = (a * a + i0 * (1.0 - a * a + inv_z)) / ((1.0 + a * a) * (1.0 + inv_z));
    } else {
        rho(0, 0) = 1.0 / (1.0 + 2.0 * z);
        rho(2, 2) = 1.0 / (2.0 + inv_z);
    }
    rho(1, 1) = 1.0 - rho(0, 0) - rho(2, 2);
    return rho;
}

/// Steady state and bookkeeping for the general N-level geometry.
struct SteadyStateReport {
    Matrix state_bare;        // energy (bare) basis
    Matrix state_collective;  // collective basis: diagonal non-dark block + frozen dark block
    double capability = 1.0;  // 1 - <Pi_d>_{rho(0)}
    double boltzmann = 0.0;   // e^{-beta omega0} (or the effective factor) used
    RealVector dark_populations;  // eigenvalues of the frozen dark block, descending
};

/// General steady state: ground population [1 + (N_eff - 1) z]^{-1} (1 - <Pi_d>),
/// every non-dark excited population z times that, and the dark block frozen
/// at its initial value. Both basis representations are returned; the bare
/// one exhibits steady coherences whenever parallel domains exist.
inline SteadyStateReport steady_general(const DipoleConfig& cfg, const DomainDecomposition& dec,
                                        const CollectiveBasis& basis, double boltzmann,
                                        const Matrix& rho0) {
    require_physical_state(rho0);
    const int n = cfg.n_levels;
    const int n_eff = dec.n_eff;
    const int n_dark = n - n_eff;

    SteadyStateReport rep;
    rep.boltzmann = boltzmann;

    Matrix dark0 = Matrix::Zero(n_dark, n_dark);
    for (int a = 0; a < n_dark; ++a)
        for (int b = 0; b < n_dark; ++b)
            dark0(a, b) = (basis.u.col(basis.dark_indices[a]).adjoint() * rho0 *
                           basis.u.col(basis.dark_indices[b]))(0);
    const double darkness = std::clamp(dark0.trace().real(), 0.0, 1.0);
    rep.capability = 1.0 - darkness;

    Matrix coll = Matrix::Zero(n, n);
    const double rho00 = rep.capability / (1.0 + (n_eff - 1) * boltzmann);
    coll(0, 0) = rho00;
    for (int m = 1; m < n_eff; ++m) coll(m, m) = boltzmann * rho00;
    for (int a = 0; a < n_dark; ++a)
        for (int b = 0; b < n_dark; ++b) coll(n_eff + a, n_eff + b) = dark0(a, b);

    rep.state_collective = coll;
    rep.state_bare = basis.u * coll * basis.u.adjoint();

    if (n_dark > 0) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitized(dark0), Eigen::EigenvaluesOnly);
        RealVector ev = es.eigenvalues();
        std::sort(ev.data(), ev.data() + ev.size(), std::greater<double>());
        rep.dark_populations = ev;
    } else {
        rep.dark_populations = RealVector(0);
    }
    return rep;
}

/// Dicke ladder populations: rho_jj = e^{-j beta omega0} rho_00 with the
/// ground population scaled by the thermalization capability 1 - darkness.
inline RealVector steady_dicke(int n_atoms, double boltzmann, double darkness) {
    if (n_atoms < 1) throw Error(Errc::invalid_config, "Dicke system needs at least one atom");
    if (darkness < 0.0 || darkness > 1.0)
        throw Error(Errc::nonphysical_input, "darkness must lie in [0, 1]");
    RealVector pops(n_atoms + 1);
    double weight = 1.0, sum = 0.0;
    for (int j = 0; j <= n_atoms; ++j) {
        pops(j) = weight;
        sum += weight;
        weight *= boltzmann;
    }
    pops *= (1.0 - darkness) / sum;
    return pops;
}

/// Initial state of maximal thermalization capability at fixed ground
/// population: populations and coherence locked to the bright-state mixture,
/// so the state is orthogonal to the dark subspace by construction.
inline Matrix optimal_initial_state(const DipoleConfig& cfg, double rho00_target) {
    if (cfg.n_levels != 3)
        throw Error(Errc::invalid_config, "optimal initial state is defined for N = 3");
    if (std::abs(cfg.alignment(0, 1)) < 1.0 - kParallelTol)
        throw Error(Errc::invalid_config,
                    "optimal initial state needs a fully aligned (single-domain) configuration");
    if (rho00_target < 0.0 || rho00_target > 1.0)
        throw Error(Errc::nonphysical_input, "ground population must lie in [0, 1]");
    const double a = cfg.alphas(1);
    const double phi = std::arg(cfg.alignment(0, 1));
    const double excited = 1.0 - rho00_target;
    Matrix rho = Matrix::Zero(3, 3);
    rho(0, 0) = rho00_target;
    rho(1, 1) = excited / (1.0 + a * a);
    rho(2, 2) = a * a * excited / (1.0 + a * a);
    rho(2, 1) = a * std::exp(imag_unit * phi) * excited / (1.0 + a * a);
    rho(1, 2) = std::conj(rho(2, 1));
    return rho;
}

}  // namespace qheat
