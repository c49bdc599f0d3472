#pragma once

#include "qheat/core.hpp"
#include "qheat/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qheat {

struct EvolveOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int samples = 201;               // output grid size (uniform in time)
    double stationarity_tol = 1e-8;  // ||L rho(t_max)|| below this marks convergence
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
    bool converged = false;
    double final_residual = 0.0;

    const Matrix& final_state() const { return states.back(); }
};

namespace detail {

/// Dormand-Prince 5(4) adaptive stepper on complex state vectors. Steps are
/// clamped to land exactly on every requested stop time, so recorded states
/// are integration states rather than interpolants.
template <typename Rhs, typename Observer>
inline void integrate_dopri5(const Rhs& rhs, Vector& y, double t0,
                             const std::vector<double>& stops, const EvolveOptions& opt,
                             const Observer& at_stop) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double t = t0;
    std::size_t next = 0;
    while (next < stops.size() && stops[next] <= t) {
        at_stop(stops[next], y);
        ++next;
    }
    if (next >= stops.size()) return;
    const double t_end = stops.back();

    Vector k1 = rhs(t, y);
    double h = (t_end - t) * 1e-4;
    const double knorm = k1.cwiseAbs().maxCoeff();
    if (knorm > 0.0) h = std::min(h, 0.01 * std::max(y.cwiseAbs().maxCoeff(), 1.0) / knorm);
    const double h_min = (t_end - t0) * 1e-14;

    while (next < stops.size()) {
        const double target = stops[next];
        double h_try = h;
        bool clipped = false;
        if (t + h_try >= target) {
            h_try = target - t;
            clipped = true;
        }
        const Vector k2 = rhs(t + c2 * h_try, y + h_try * (a21 * k1));
        const Vector k3 = rhs(t + c3 * h_try, y + h_try * (a31 * k1 + a32 * k2));
        const Vector k4 = rhs(t + c4 * h_try, y + h_try * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vector k5 =
            rhs(t + c5 * h_try, y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vector k6 = rhs(
            t + h_try, y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Vector ynew = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vector k7 = rhs(t + h_try, ynew);
        const Vector err = h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double norm = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double scale =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
            norm = std::max(norm, std::abs(err(i)) / scale);
        }
        const bool accept = norm <= 1.0;
        if (accept) {
            y = ynew;
            k1 = k7;  // first-same-as-last
            if (clipped) {
                t = target;
                at_stop(target, y);
                ++next;
            } else {
                t += h_try;
            }
        }
        double factor = norm > 0.0 ? 0.9 * std::pow(norm, -0.2) : 5.0;
        factor = std::clamp(factor, 0.2, 5.0);
        if (!accept || !clipped) h = h_try * factor;
        if (h < h_min)
            throw Error(Errc::step_failure, "adaptive step size underflow during evolution");
    }
}

template <typename Rhs, typename ToState>
inline Trajectory run_evolution(const Rhs& rhs, const Vector& y0, double t_max,
                                const EvolveOptions& opt, const ToState& to_state) {
    Trajectory out;
    const int samples = std::max(opt.samples, 2);
    std::vector<double> grid(samples);
    for (int k = 0; k < samples; ++k) grid[k] = t_max * k / double(samples - 1);

    Vector y = y0;
    Vector y_final = y0;
    detail::integrate_dopri5(rhs, y, 0.0, grid, opt, [&](double t, const Vector& yy) {
        out.times.push_back(t);
        out.states.push_back(to_state(yy));
        y_final = yy;
    });
    out.final_residual = rhs(t_max, y_final).cwiseAbs().maxCoeff();
    out.converged = out.final_residual < opt.stationarity_tol;
    return out;
}

inline Matrix three_level_state(const Vector& y) {
    Matrix rho = Matrix::Zero(3, 3);
    rho(2, 1) = y(0);
    rho(1, 2) = y(1);
    rho(0, 0) = y(2);
    rho(2, 2) = y(3);
    rho(1, 1) = 1.0 - y(2) - y(3);
    rho(1, 0) = y(4);
    rho(0, 1) = y(5);
    rho(2, 0) = y(6);
    rho(0, 2) = y(7);
    return rho;
}

}  // namespace detail

/// Integrate d rho/dt = L rho from a physical initial state.
inline Trajectory evolve(const Superoperator& gen, const Matrix& rho0, double t_max,
                         const EvolveOptions& opt = {}) {
    if (rho0.rows() != gen.dim || rho0.cols() != gen.dim)
        throw Error(Errc::nonphysical_input, "initial state dimension mismatch");
    require_physical_state(rho0);
    const int d = gen.dim;
    auto rhs = [&gen](double, const Vector& y) -> Vector { return gen.m * y; };
    return detail::run_evolution(rhs, vectorize(rho0), t_max, opt,
                                 [d](const Vector& y) { return devectorize(y, d); });
}

/// Integrate the three-level moment system (excited block x and the
/// independently damped ground-excited coherences y together). With nonzero
/// detuning the cross-term phases rotate as exp(+-i Delta t).
inline Trajectory evolve(const ThreeLevelOde& ode, const Matrix& rho0, double t_max,
                         const EvolveOptions& opt = {}) {
    if (rho0.rows() != 3 || rho0.cols() != 3)
        throw Error(Errc::nonphysical_input, "three-level evolution needs a 3x3 state");
    require_physical_state(rho0);
    Vector y0(8);
    y0 << rho0(2, 1), rho0(1, 2), rho0(0, 0), rho0(2, 2), rho0(1, 0), rho0(0, 1), rho0(2, 0),
        rho0(0, 2);

    auto rhs = [&ode](double t, const Vector& y) -> Vector {
        Vector dy(8);
        if (ode.time_dependent) {
            Eigen::Matrix4cd a, bc;
            Eigen::Vector4cd b;
            three_level_ode_at(ode, t, a, b, bc);
            dy.head<4>() = a * y.head<4>() + b;
            dy.tail<4>() = bc * y.tail<4>();
        } else {
            dy.head<4>() = ode.coeff * y.head<4>() + ode.inhom;
            dy.tail<4>() = ode.coherence_coeff * y.tail<4>();
        }
        return dy;
    };
    return detail::run_evolution(rhs, y0, t_max, opt, &detail::three_level_state);
}

/// Detuned three-level evolution (time-dependent phases of the cross terms).
inline Trajectory evolve_detuned(const ThreeLevelParams& params, const Matrix& rho0,
                                 double t_max, const EvolveOptions& opt = {}) {
    return evolve(three_level_ode(params), rho0, t_max, opt);
}

/// Unique steady state from the null space of the generator (SVD with
/// threshold 1e-10 x top singular value). Throws ambiguous_steady_state when
/// dark states make the null space degenerate.
inline Matrix steady_state(const Superoperator& gen) {
    Eigen::JacobiSVD<Matrix> svd(gen.m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector s = svd.singularValues();
    const double thresh = 1e-10 * std::max(s.size() > 0 ? s(0) : 0.0, 1e-300);
    int null_dim = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) <= thresh) ++null_dim;
    if (null_dim == 0)
        throw Error(Errc::non_convergent, "generator has no steady state (not trace preserving?)");
    if (null_dim > 1)
        throw Error(Errc::ambiguous_steady_state,
                    "steady-state manifold is degenerate; supply an initial state");
    Matrix rho = hermitized(devectorize(svd.matrixV().col(s.size() - 1), gen.dim));
    const double tr = rho.trace().real();
    if (std::abs(tr) < 1e-12)
        throw Error(Errc::non_convergent, "null vector is traceless; no physical steady state");
    return rho / tr;
}

/// Steady state consistent with the conserved quantities of rho0. The left
/// null space of the generator spans the conserved functionals (trace and the
/// frozen dark block); matching their values on rho0 selects the unique
/// projection-consistent point of the steady manifold: dark block frozen at
/// its initial value, non-dark block thermalized.
inline Matrix steady_state(const Superoperator& gen, const Matrix& rho0) {
    require_physical_state(rho0);
    if (rho0.rows() != gen.dim)
        throw Error(Errc::nonphysical_input, "initial state dimension mismatch");
    Eigen::JacobiSVD<Matrix> svd(gen.m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector s = svd.singularValues();
    const double thresh = 1e-10 * std::max(s.size() > 0 ? s(0) : 0.0, 1e-300);
    std::vector<Eigen::Index> null_cols;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) <= thresh) null_cols.push_back(k);
    const int m = static_cast<int>(null_cols.size());
    if (m == 0)
        throw Error(Errc::non_convergent, "generator has no steady state (not trace preserving?)");

    Matrix right(gen.m.rows(), m), left(gen.m.rows(), m);
    for (int k = 0; k < m; ++k) {
        right.col(k) = svd.matrixV().col(null_cols[k]);
        left.col(k) = svd.matrixU().col(null_cols[k]);
    }
    const Matrix overlap = left.adjoint() * right;
    const Vector targets = left.adjoint() * vectorize(rho0);
    const Vector coeffs = overlap.fullPivLu().solve(targets);
    return hermitized(devectorize(right * coeffs, gen.dim));
}

/// Integral of motion of the aligned three-level system,
/// I = (alpha^2 rho11 + rho22 - 2 alpha Re[e^{i phi} rho12]) / (1 + alpha^2):
/// the overlap of the state with the dark direction; constant along
/// trajectories when p = 1 and Delta = 0.
inline double integral_of_motion(const ThreeLevelParams& params, const Matrix& rho) {
    if (rho.rows() != 3 || rho.cols() != 3)
        throw Error(Errc::nonphysical_input, "integral of motion is defined for 3x3 states");
    const double a = params.alpha;
    const double cross = (std::exp(imag_unit * params.phase) * rho(1, 2)).real();
    return (a * a * rho(1, 1).real() + rho(2, 2).real() - 2.0 * a * cross) / (1.0 + a * a);
}

}  // namespace qheat
