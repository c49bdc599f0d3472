#pragma once

#include "qheat/baths.hpp"
#include "qheat/core.hpp"
#include "qheat/geometry.hpp"

#include <cmath>
#include <ostream>

namespace qheat {

/// Dissipative generator as a dim^2 x dim^2 matrix acting on column-stacked
/// density matrices. Assembled generators are immutable values and safe to
/// share across threads.
struct Superoperator {
    int dim = 0;
    Matrix m;

    static Superoperator zero(int dim) {
        Superoperator s;
        s.dim = dim;
        s.m = Matrix::Zero(dim * dim, dim * dim);
        return s;
    }

    Matrix apply(const Matrix& rho) const { return devectorize(m * vectorize(rho), dim); }

    Superoperator& operator+=(const Superoperator& other) {
        m += other.m;
        return *this;
    }
};

/// D(a, b) rho = 2 a rho b - b a rho - rho b a as a superoperator.
inline Superoperator dissipator(const Matrix& a, const Matrix& b) {
    const int d = static_cast<int>(a.rows());
    const Matrix ba = b * a;
    const Matrix id = Matrix::Identity(d, d);
    Superoperator s;
    s.dim = d;
    s.m = 2.0 * kron(b.transpose(), a) - kron(id, ba) - kron(ba.transpose(), id);
    return s;
}

/// sigma_+^j = |j><0| for transition j (1-based level index j in 1..N-1).
inline Matrix raising_operator(int dim, int level) {
    Matrix m = Matrix::Zero(dim, dim);
    m(level, 0) = 1.0;
    return m;
}

/// Kossakowski coupling matrix K_{jj'} = alpha_j alpha_j' p_{jj'} e^{i phi_{jj'}}.
/// PSD by the Gram structure of the alignment matrix.
inline Matrix coupling_matrix(const DipoleConfig& cfg) {
    const auto d = cfg.alphas.cast<Complex>().asDiagonal();
    return d * cfg.alignment * d;
}

/// Emission/absorption generator with given downward and upward prefactors
/// (already containing the 1/2 P(q) G factors is the caller's job; here the
/// canonical 1/2 of the master equation is applied).
inline Superoperator dipole_generator(const DipoleConfig& cfg, double g_down, double g_up) {
    const int d = cfg.n_levels;
    const int nt = cfg.transitions();
    Superoperator out = Superoperator::zero(d);
    if (g_down == 0.0 && g_up == 0.0) return out;
    const Matrix k = coupling_matrix(cfg);
    std::vector<Matrix> sp(nt), sm(nt);
    for (int j = 0; j < nt; ++j) {
        sp[j] = raising_operator(d, j + 1);
        sm[j] = sp[j].adjoint();
    }
    for (int j = 0; j < nt; ++j)
        for (int jp = 0; jp < nt; ++jp) {
            const Complex w = k(j, jp);
            if (w == Complex(0.0)) continue;
            if (g_down != 0.0) out.m += 0.5 * g_down * w * dissipator(sm[j], sp[jp]).m;
            if (g_up != 0.0) out.m += 0.5 * g_up * std::conj(w) * dissipator(sp[j], sm[jp]).m;
        }
    return out;
}

/// Sub-bath Liouvillian for bath i at the q-th harmonic sideband:
/// prefactors (1/2) P(q) G_i(+-(omega0 + q Omega)), diagonal dissipators
/// weighted alpha_j^2 and cross dissipators weighted by the alignment matrix.
inline Superoperator build_sub_liouvillian(const DipoleConfig& cfg, const BathSpec& bath,
                                           const ModulationSpec& mod, int q, double omega0) {
    const double p = mod.weight(q);
    const double wq = mod.sideband(q, omega0);
    if (p > 0.0 && wq <= 0.0)
        throw Error(Errc::invalid_config, "weighted sideband at nonpositive frequency");
    if (p == 0.0) return Superoperator::zero(cfg.n_levels);
    return dipole_generator(cfg, p * response(bath, wq), p * response(bath, -wq));
}

/// Full generator: sum of the sub-bath Liouvillians over both baths and the
/// support of P(q).
inline Superoperator build_total_liouvillian(const DipoleConfig& cfg, const BathSpec& cold,
                                             const BathSpec& hot, const ModulationSpec& mod,
                                             double omega0) {
    Superoperator total = Superoperator::zero(cfg.n_levels);
    for (const auto& [q, p] : mod.weights) {
        if (p == 0.0) continue;
        total += build_sub_liouvillian(cfg, cold, mod, q, omega0);
        total += build_sub_liouvillian(cfg, hot, mod, q, omega0);
    }
    return total;
}

inline void dump_superoperator_csv(const Superoperator& s, std::ostream& os) {
    os << "row,col,re,im\n";
    for (Eigen::Index r = 0; r < s.m.rows(); ++r)
        for (Eigen::Index c = 0; c < s.m.cols(); ++c) {
            const Complex v = s.m(r, c);
            if (v == Complex(0.0)) continue;
            os << r << ',' << c << ',' << v.real() << ',' << v.imag() << '\n';
        }
}

// ---------------------------------------------------------------------------
// Three-level system (one ground state, two degenerate excited states).

struct ThreeLevelParams {
    double alpha = 1.0;      // relative strength of the second transition
    double alignment = 1.0;  // p = p_12 in [0, 1]
    double phase = 0.0;      // phi = phi_12
    double response = 1.0;   // G(omega0)
    double boltzmann = 0.5;  // e^{-beta omega0}
    double detuning = 0.0;   // Delta between the excited levels

    static ThreeLevelParams from_config(const DipoleConfig& cfg, double response_at_resonance,
                                        double boltzmann, double detuning = 0.0) {
        if (cfg.n_levels != 3)
            throw Error(Errc::invalid_config, "three-level parameters need n_levels == 3");
        ThreeLevelParams p;
        p.alpha = cfg.alphas(1);
        p.alignment = std::abs(cfg.alignment(0, 1));
        p.phase = std::arg(cfg.alignment(0, 1));
        p.response = response_at_resonance;
        p.boltzmann = boltzmann;
        p.detuning = detuning;
        return p;
    }
};

/// Linear ODE system for the three-level density matrix split into the
/// closed excited-block vector x = (rho21, rho12, rho00, rho22) with
/// dx/dt = coeff x + inhom, and the independently damped ground-excited
/// coherences y = (rho10, rho01, rho20, rho02) with dy/dt = coherence_coeff y.
/// With nonzero detuning the cross-term phases rotate as phi -> phi + Delta t
/// and the matrices below are the t = 0 snapshot.
struct ThreeLevelOde {
    ThreeLevelParams params;
    Eigen::Matrix4cd coeff;
    Eigen::Vector4cd inhom;
    Eigen::Matrix4cd coherence_coeff;
    bool time_dependent = false;
};

namespace detail {

inline void fill_three_level(const ThreeLevelParams& p, double phi, Eigen::Matrix4cd& a,
                             Eigen::Vector4cd& b, Eigen::Matrix4cd& bc) {
    const double al = p.alpha, pr = p.alignment, g = p.response, z = p.boltzmann;
    const Complex e = std::exp(imag_unit * phi);
    const Complex c = pr * al * e;
    const double u = 1.0 + al * al;
    a.setZero();
    a(0, 0) = -u;
    a(0, 2) = c * (1.0 + 2.0 * z);
    a(1, 1) = -u;
    a(1, 2) = std::conj(c) * (1.0 + 2.0 * z);
    a(2, 0) = 2.0 * std::conj(c);
    a(2, 1) = 2.0 * c;
    a(2, 2) = -2.0 - 2.0 * z * u;
    a(2, 3) = 2.0 * (al * al - 1.0);
    a(3, 0) = -std::conj(c);
    a(3, 1) = -c;
    a(3, 2) = 2.0 * al * al * z;
    a(3, 3) = -2.0 * al * al;
    a *= 0.5 * g;
    b << -c, -std::conj(c), 2.0, 0.0;
    b *= 0.5 * g;

    // Ground-excited coherence damping. The up-scattering coefficient is
    // (1 + alpha^2) e^{-beta omega0}, fixed by the superoperator form of the
    // master equation.
    const double ca = 1.0 + u * z;
    const double cb = al * al + u * z;
    bc.setZero();
    bc(0, 0) = ca;
    bc(0, 2) = std::conj(c);
    bc(1, 1) = ca;
    bc(1, 3) = c;
    bc(2, 0) = c;
    bc(2, 2) = cb;
    bc(3, 1) = std::conj(c);
    bc(3, 3) = cb;
    bc *= -0.5 * g;
}

}  // namespace detail

inline ThreeLevelOde three_level_ode(const ThreeLevelParams& params) {
    ThreeLevelOde ode;
    ode.params = params;
    ode.time_dependent = params.detuning != 0.0;
    detail::fill_three_level(params, params.phase, ode.coeff, ode.inhom, ode.coherence_coeff);
    return ode;
}

/// Snapshot of the detuned coefficient matrices at time t (cross-term phases
/// rotated by Delta t).
inline void three_level_ode_at(const ThreeLevelOde& ode, double t, Eigen::Matrix4cd& a,
                               Eigen::Vector4cd& b, Eigen::Matrix4cd& bc) {
    detail::fill_three_level(ode.params, ode.params.phase + ode.params.detuning * t, a, b, bc);
}

/// Closed form of det(coeff): [G/2]^4 4 alpha^2 (1+2z) [(1+alpha^2)^2 (1-p^2) + Delta^2/G^2].
/// Vanishes exactly when p = 1 and Delta = 0; the determinant-vs-formula
/// equality against the numeric matrix holds for Delta = 0.
inline double coefficient_determinant(const ThreeLevelParams& p) {
    const double u = 1.0 + p.alpha * p.alpha;
    const double bracket = u * u * (1.0 - p.alignment * p.alignment) +
                           (p.detuning * p.detuning) / (p.response * p.response);
    return std::pow(0.5 * p.response, 4) * 4.0 * p.alpha * p.alpha *
           (1.0 + 2.0 * p.boltzmann) * bracket;
}

// ---------------------------------------------------------------------------
// Dicke system: N two-level atoms mapped onto the N+1 symmetric ladder states.

/// Ladder amplitude convention. `uniform` takes the collective jump operator
/// literally as sum_j |j><j+1|, the form all closed-form Dicke currents and
/// enhancement ratios are built on. `collective_spin` uses the spin-N/2
/// lowering amplitudes sqrt(j(N-j+1)/N), which reproduce the individual
/// superradiant emission rates gamma j(N-j+1); its steady state is the same
/// geometric ladder.
enum class DickeLadder { uniform, collective_spin };

inline Matrix dicke_lowering(int n_atoms, DickeLadder ladder) {
    const int d = n_atoms + 1;
    Matrix a = Matrix::Zero(d, d);
    for (int j = 0; j < n_atoms; ++j) {
        const double amp = ladder == DickeLadder::uniform
                               ? 1.0
                               : std::sqrt(double(j + 1) * double(n_atoms - j) / double(n_atoms));
        a(j, j + 1) = amp;
    }
    return a;
}

/// Dicke generator with explicit downward/upward rates; the thermal pair is
/// (G(w), G(-w)) with G(-w) = e^{-beta w} G(w) by KMS.
inline Superoperator dicke_generator(int n_atoms, double g_down, double g_up,
                                     DickeLadder ladder = DickeLadder::uniform) {
    const Matrix a = dicke_lowering(n_atoms, ladder);
    const Matrix ad = a.adjoint();
    Superoperator s = Superoperator::zero(n_atoms + 1);
    if (g_down != 0.0) s.m += n_atoms * 0.5 * g_down * dissipator(a, ad).m;
    if (g_up != 0.0) s.m += n_atoms * 0.5 * g_up * dissipator(ad, a).m;
    return s;
}

inline Superoperator build_dicke_liouvillian(int n_atoms, const BathSpec& bath,
                                             const ModulationSpec& mod, int q, double omega0,
                                             DickeLadder ladder = DickeLadder::uniform) {
    if (n_atoms < 1) throw Error(Errc::invalid_config, "Dicke system needs at least one atom");
    const double p = mod.weight(q);
    const double wq = mod.sideband(q, omega0);
    if (p > 0.0 && wq <= 0.0)
        throw Error(Errc::invalid_config, "weighted sideband at nonpositive frequency");
    if (p == 0.0) return Superoperator::zero(n_atoms + 1);
    return dicke_generator(n_atoms, p * response(bath, wq), p * response(bath, -wq), ladder);
}

inline Superoperator build_dicke_total(int n_atoms, const BathSpec& cold, const BathSpec& hot,
                                       const ModulationSpec& mod, double omega0,
                                       DickeLadder ladder = DickeLadder::uniform) {
    Superoperator total = Superoperator::zero(n_atoms + 1);
    for (const auto& [q, p] : mod.weights) {
        if (p == 0.0) continue;
        total += build_dicke_liouvillian(n_atoms, cold, mod, q, omega0, ladder);
        total += build_dicke_liouvillian(n_atoms, hot, mod, q, omega0, ladder);
    }
    return total;
}

}  // namespace qheat
