#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "imkg/errors.hpp"
#include "imkg/format.hpp"
#include "imkg/hevi_stability.hpp"
#include "imkg/integrator.hpp"

namespace imkg {

// ---- split Dahlquist, state (Re x, Im x) ----

inline Vector complex_times(std::complex<double> l, const Vector& x) {
    Vector y(2);
    y << l.real() * x[0] - l.imag() * x[1], l.imag() * x[0] + l.real() * x[1];
    return y;
}

inline SplitOdeProblem dahlquist_split(std::complex<double> lambda_n, std::complex<double> lambda_s,
                                       std::complex<double> x0 = 1.0) {
    SplitOdeProblem p;
    p.name = "dahlquist";
    p.dimension = 2;
    p.nonstiff = [lambda_n](const Vector& x, double) { return complex_times(lambda_n, x); };
    p.stiff = [lambda_s](const Vector& x, double) { return complex_times(lambda_s, x); };
    p.stiff_jacobian = [lambda_s](const Vector&, double) {
        Matrix J(2, 2);
        J << lambda_s.real(), -lambda_s.imag(), lambda_s.imag(), lambda_s.real();
        return J;
    };
    p.stiff_is_linear = true;
    p.initial_state = Vector(2);
    p.initial_state << x0.real(), x0.imag();
    p.exact_solution = [x0, l = lambda_n + lambda_s](double t) {
        const std::complex<double> v = x0 * std::exp(l * t);
        Vector y(2);
        y << v.real(), v.imag();
        return y;
    };
    p.component_names = {"re", "im"};
    return p;
}

// ---- HEVI test equation u' = -i(k_x N + k_z S)u, state (Re u, Im u) ----

inline Vector hevi_apply(double k, const Eigen::Matrix3d& M, const Vector& x) {
    Vector y(6);
    y.head<3>() = k * (M * x.tail<3>());
    y.tail<3>() = -k * (M * x.head<3>());
    return y;
}

inline Matrix hevi_generator_real(double k, const Eigen::Matrix3d& M) {
    Matrix J = Matrix::Zero(6, 6);
    J.block<3, 3>(0, 3) = k * M;
    J.block<3, 3>(3, 0) = -k * M;
    return J;
}

inline Eigen::Vector3cd to_complex3(const Vector& x) {
    Eigen::Vector3cd u;
    for (int i = 0; i < 3; ++i) u[i] = {x[i], x[i + 3]};
    return u;
}

inline Vector from_complex3(const Eigen::Vector3cd& u) {
    Vector x(6);
    for (int i = 0; i < 3; ++i) {
        x[i] = u[i].real();
        x[i + 3] = u[i].imag();
    }
    return x;
}

inline Vector hevi_default_state() {
    Vector x(6);
    x << 1.0, 0.5, -0.25, 0.3, -0.2, 0.1;
    return x;
}

inline SplitOdeProblem hevi_problem(double kx, double kz, Vector u0 = hevi_default_state()) {
    SplitOdeProblem p;
    p.name = "hevi";
    p.dimension = 6;
    p.nonstiff = [kx](const Vector& x, double) { return hevi_apply(kx, hevi_N(), x); };
    p.stiff = [kz](const Vector& x, double) { return hevi_apply(kz, hevi_S(), x); };
    p.stiff_jacobian = [kz](const Vector&, double) { return hevi_generator_real(kz, hevi_S()); };
    p.stiff_is_linear = true;
    // (I + i gamma k_z S) g = E
    p.stage_solver = [kz](const Vector& E, double gamma, double, const NewtonConfig&) {
        const Matrix3c M = Matrix3c::Identity() + std::complex<double>(0.0, gamma * kz) * hevi_S().cast<cplx>();
        StageSolveResult r;
        r.g = from_complex3(M.partialPivLu().solve(to_complex3(E)));
        r.iterations = 1;
        return r;
    };
    const Eigen::Matrix3d H = kx * hevi_N() + kz * hevi_S();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
    const Eigen::Matrix3d V = es.eigenvectors();
    const Eigen::Vector3d lam = es.eigenvalues();
    p.exact_solution = [V, lam, u0](double t) {
        const Eigen::Vector3cd w = V.transpose().cast<cplx>() * to_complex3(u0);
        Eigen::Vector3cd e;
        for (int i = 0; i < 3; ++i) e[i] = std::exp(std::complex<double>(0.0, -lam[i] * t)) * w[i];
        return from_complex3(V.cast<cplx>() * e);
    };
    p.initial_state = std::move(u0);
    p.component_names = {"re_u1", "re_u2", "re_u3", "im_u1", "im_u2", "im_u3"};
    return p;
}

// ---- tridiagonal solve ----

// sub[i] multiplies x[i-1], sup[i] multiplies x[i+1]; sub[0] and sup[n-1] are ignored.
inline Vector thomas_solve(const Vector& sub, const Vector& diag, const Vector& sup, const Vector& rhs) {
    const Eigen::Index n = diag.size();
    Vector cp(n), dp(n), x(n);
    double den = diag[0];
    if (den == 0.0) throw SolverError("zero pivot in tridiagonal solve");
    cp[0] = n > 1 ? sup[0] / den : 0.0;
    dp[0] = rhs[0] / den;
    for (Eigen::Index i = 1; i < n; ++i) {
        den = diag[i] - sub[i] * cp[i - 1];
        if (den == 0.0 || !std::isfinite(den)) throw SolverError("zero pivot in tridiagonal solve");
        cp[i] = i < n - 1 ? sup[i] / den : 0.0;
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / den;
    }
    x[n - 1] = dp[n - 1];
    for (Eigen::Index i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
    return x;
}

// ---- vertical acoustic column ----

struct ColumnConstants {
    double g = 9.80616;
    double R = 287.04;
    double cp = 1004.64;
    double kappa() const { return R / cp; }
};

// Interfaces k = 0..L from top to bottom; midpoint i lies between interfaces i and i+1.
struct ColumnBackground {
    int L = 20;
    ColumnConstants constants;
    double p_top = 225.0;
    double p_surface = 1e5;
    double T_ref = 300.0;
    double phi_surface = 0.0;
    std::vector<double> eta;       // interfaces, L+1
    std::vector<double> dpi;       // ∂π/∂η on midpoints
    std::vector<double> pi_iface;  // π on interfaces
    std::vector<double> pi_mid;    // π on midpoints
    std::vector<double> Theta;     // mass-weighted potential temperature on midpoints
    double deta = 0.0;

    // Isothermal background with η uniform in [p_top/p_surface, 1].
    static ColumnBackground isothermal(int L = 20, double T_ref = 300.0, double p_top = 225.0,
                                       double p_surface = 1e5) {
        if (L < 2 || !(p_top > 0.0) || !(p_surface > p_top) || !(T_ref > 0.0))
            throw DomainError("invalid column background parameters");
        ColumnBackground bg;
        bg.L = L;
        bg.T_ref = T_ref;
        bg.p_top = p_top;
        bg.p_surface = p_surface;
        const double eta_top = p_top / p_surface;
        bg.deta = (1.0 - eta_top) / L;
        bg.eta.resize(L + 1);
        for (int k = 0; k <= L; ++k) bg.eta[k] = eta_top + bg.deta * k;
        bg.eta[L] = 1.0;
        bg.dpi.assign(L, p_surface);
        bg.pi_iface.resize(L + 1);
        bg.pi_iface[0] = p_top;
        for (int i = 0; i < L; ++i) bg.pi_iface[i + 1] = bg.pi_iface[i] + bg.dpi[i] * bg.deta;
        bg.pi_mid.resize(L);
        bg.Theta.resize(L);
        const double kap = bg.constants.kappa();
        for (int i = 0; i < L; ++i) {
            bg.pi_mid[i] = 0.5 * (bg.pi_iface[i] + bg.pi_iface[i + 1]);
            bg.Theta[i] = bg.dpi[i] * T_ref * std::pow(bg.pi_mid[i], -kap);
        }
        return bg;
    }

    // π_mid differences used as the μ denominators; the top one reaches up to π_top.
    double mu_denominator(int k) const { return k == 0 ? pi_mid[0] - p_top : pi_mid[k] - pi_mid[k - 1]; }
};

class AcousticColumn {
public:
    explicit AcousticColumn(ColumnBackground bg) : bg_(std::move(bg)) {
        const int L = bg_.L;
        if (static_cast<int>(bg_.eta.size()) != L + 1 || static_cast<int>(bg_.Theta.size()) != L ||
            static_cast<int>(bg_.pi_mid.size()) != L)
            throw DomainError("inconsistent column background");
        for (double v : bg_.dpi)
            if (!(v > 0.0)) throw DomainError("dpi must be positive");
    }

    const ColumnBackground& background() const { return bg_; }
    int levels() const { return bg_.L; }
    int dimension() const { return 2 * (bg_.L + 1); }

    Vector hydrostatic_phi() const {
        const int L = bg_.L;
        const double kap = bg_.constants.kappa();
        Vector phi(L + 1);
        phi[L] = bg_.phi_surface;
        for (int i = L - 1; i >= 0; --i)
            phi[i] = phi[i + 1] + bg_.constants.R * bg_.Theta[i] * std::pow(bg_.pi_mid[i], kap - 1.0) * bg_.deta;
        return phi;
    }

    // State layout: (w_0..w_L, φ_0..φ_L).
    Vector hydrostatic_state() const {
        Vector x = Vector::Zero(dimension());
        x.tail(bg_.L + 1) = hydrostatic_phi();
        return x;
    }

    // p on midpoints from p = (-(∂φ/∂η)/(RΘ))^(1/(κ-1)).
    Vector pressure(const Vector& phi) const {
        const int L = bg_.L;
        const double e = 1.0 / (bg_.constants.kappa() - 1.0);
        Vector p(L);
        for (int i = 0; i < L; ++i) {
            const double base = (phi[i] - phi[i + 1]) / (bg_.deta * bg_.constants.R * bg_.Theta[i]);
            if (!(base > 0.0))
                throw DomainError("column state out of domain: nonpositive layer thickness at midpoint " +
                                  std::to_string(i));
            p[i] = 1.0 / std::pow(base, -e);
        }
        return p;
    }

    // μ on interfaces 0..L-1.
    Vector mu(const Vector& phi) const {
        const Vector p = pressure(phi);
        const int L = bg_.L;
        Vector m(L);
        for (int k = 0; k < L; ++k) m[k] = (p[k] - (k == 0 ? bg_.p_top : p[k - 1])) / bg_.mu_denominator(k);
        return m;
    }

    // Tridiagonal ∂μ/∂φ over φ_0..φ_{L-1}; sup[L-1] is the coupling to the fixed surface φ_L.
    void dmu_dphi(const Vector& phi, Vector& sub, Vector& diag, Vector& sup) const {
        const int L = bg_.L;
        const double e = 1.0 / (bg_.constants.kappa() - 1.0);
        const Vector p = pressure(phi);
        Vector D(L);  // ∂p_i/∂φ_i = -∂p_i/∂φ_{i+1}
        for (int i = 0; i < L; ++i) {
            const double scale = bg_.deta * bg_.constants.R * bg_.Theta[i];
            const double base = (phi[i] - phi[i + 1]) / scale;
            D[i] = e * p[i] / base / scale;
        }
        sub = Vector::Zero(L);
        diag = Vector::Zero(L);
        sup = Vector::Zero(L);
        for (int k = 0; k < L; ++k) {
            const double M = bg_.mu_denominator(k);
            diag[k] = (D[k] + (k > 0 ? D[k - 1] : 0.0)) / M;
            if (k > 0) sub[k] = -D[k - 1] / M;
            sup[k] = -D[k] / M;
        }
    }

    Vector stiff(const Vector& x) const {
        const int L = bg_.L;
        const double g = bg_.constants.g;
        const Vector phi = x.tail(L + 1);
        const Vector m = mu(phi);
        Vector s = Vector::Zero(dimension());
        for (int k = 0; k < L; ++k) {
            s[k] = -g * (1.0 - m[k]);
            s[L + 1 + k] = g * x[k];
        }
        return s;
    }

    Matrix stiff_jacobian(const Vector& x) const {
        const int L = bg_.L;
        const double g = bg_.constants.g;
        Vector sub, diag, sup;
        dmu_dphi(x.tail(L + 1), sub, diag, sup);
        Matrix J = Matrix::Zero(dimension(), dimension());
        const int off = L + 1;
        for (int k = 0; k < L; ++k) {
            J(k, off + k) = g * diag[k];
            if (k > 0) J(k, off + k - 1) = g * sub[k];
            J(k, off + k + 1) = g * sup[k];
            J(off + k, k) = g;
        }
        return J;
    }

    // Reduced stage solve: Newton on G(φ) = φ - E^φ - γ_g E^w + γ_g²(1 - μ(φ)), γ_g = g·gamma.
    StageSolveResult stage_solve(const Vector& E, double gamma, const NewtonConfig& cfg, const Vector& eps_a) const {
        cfg.validate();
        const int L = bg_.L, off = L + 1;
        const double gg = bg_.constants.g * gamma;
        const Vector Ew = E.head(L + 1), Ephi = E.tail(L + 1);
        Vector phi = Ephi;
        Vector x = E, delta(dimension());
        NewtonMonitor mon(cfg);
        for (;;) {
            const Vector m = mu(phi);
            Vector sub, diag, sup;
            dmu_dphi(phi, sub, diag, sup);
            Vector G(L);
            for (int k = 0; k < L; ++k) G[k] = phi[k] - Ephi[k] - gg * Ew[k] + gg * gg * (1.0 - m[k]);
            const Vector dphi = thomas_solve(-gg * gg * sub, Vector::Ones(L) - gg * gg * diag, -gg * gg * sup, -G);
            delta.setZero();
            for (int k = 0; k < L; ++k) {
                delta[k] = dphi[k] / gg;
                delta[off + k] = dphi[k];
            }
            const double norm = wrms_norm(delta, x, cfg.eps_r, eps_a);
            phi.head(L) += dphi;
            for (int k = 0; k < L; ++k) x[k] = (phi[k] - Ephi[k]) / gg;
            x.tail(L + 1) = phi;
            if (!x.allFinite()) throw SolverError("non-finite Newton iterate");
            if (mon.converged(norm)) return {x, mon.iterations(), norm};
            if (mon.exhausted())
                throw ConvergenceError("column Newton did not converge in " + std::to_string(cfg.max_iters) +
                                           " iterations, final norm " + fmt17(norm),
                                       mon.iterations(), norm);
        }
    }

    Vector default_abs_tol() const {
        Vector a(dimension());
        a.head(bg_.L + 1).setConstant(1e-5);
        a.tail(bg_.L + 1).setConstant(1e-2);
        return a;
    }

    // Rows ordered by η: interfaces carry w, φ, μ; midpoints carry p.
    void write_snapshot_csv(const Vector& x, std::ostream& os) const {
        const int L = bg_.L;
        const Vector phi = x.tail(L + 1);
        const Vector p = pressure(phi);
        const Vector m = mu(phi);
        os << "eta,w,phi,p,mu\n";
        for (int k = 0; k <= L; ++k) {
            os << fmt17(bg_.eta[k]) << ',' << fmt17(x[k]) << ',' << fmt17(phi[k]) << ",,";
            if (k < L) os << fmt17(m[k]);
            os << '\n';
            if (k < L) os << fmt17(0.5 * (bg_.eta[k] + bg_.eta[k + 1])) << ",,," << fmt17(p[k]) << ",\n";
        }
    }

private:
    ColumnBackground bg_;
};

inline SplitOdeProblem acoustic_column(const ColumnBackground& bg) {
    auto col = std::make_shared<const AcousticColumn>(bg);
    SplitOdeProblem p;
    p.name = "column";
    p.dimension = col->dimension();
    p.nonstiff = [n = col->dimension()](const Vector&, double) { return Vector(Vector::Zero(n)); };
    p.stiff = [col](const Vector& x, double) { return col->stiff(x); };
    p.stiff_jacobian = [col](const Vector& x, double) { return col->stiff_jacobian(x); };
    p.abs_tol = col->default_abs_tol();
    p.stage_solver = [col, tol = p.abs_tol](const Vector& E, double gamma, double, const NewtonConfig& cfg) {
        return col->stage_solve(E, gamma, cfg, cfg.eps_a.size() == tol.size() ? cfg.eps_a : tol);
    };
    p.initial_state = col->hydrostatic_state();
    for (int k = 0; k <= bg.L; ++k) p.component_names.push_back("w" + std::to_string(k));
    for (int k = 0; k <= bg.L; ++k) p.component_names.push_back("phi" + std::to_string(k));
    return p;
}

inline StageSolveResult column_stage_solve(const ColumnBackground& bg, const Vector& Ew, const Vector& Ephi,
                                           double ahat_jj, double dt, const NewtonConfig& cfg = {}) {
    const AcousticColumn col(bg);
    Vector E(col.dimension());
    E << Ew, Ephi;
    const Vector tol = cfg.eps_a.size() == E.size() ? cfg.eps_a : col.default_abs_tol();
    return col.stage_solve(E, dt * ahat_jj, cfg, tol);
}

// Smooth w pulse centred in the column.
inline Vector perturbed_column_state(const AcousticColumn& col, double amplitude) {
    Vector x = col.hydrostatic_state();
    const int L = col.levels();
    for (int k = 0; k < L; ++k) {
        const double s = (k - 0.5 * L) / (0.15 * L);
        x[k] = amplitude * std::exp(-s * s);
    }
    return x;
}

}  // namespace imkg
