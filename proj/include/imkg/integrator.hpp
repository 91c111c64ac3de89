#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "imkg/errors.hpp"
#include "imkg/format.hpp"
#include "imkg/tableau.hpp"

namespace imkg {

struct NewtonConfig {
    double epsilon = 0.1;
    double eps_r = 1e-6;
    Vector eps_a;  // empty: problem default, else eps_r in every component
    int max_iters = 20;
    double rate_floor = 0.3;

    void validate() const {
        if (!(epsilon > 0.0) || !(eps_r > 0.0) || max_iters < 1 || !(rate_floor > 0.0))
            throw DomainError("Newton tolerances must be positive");
        for (Eigen::Index i = 0; i < eps_a.size(); ++i)
            if (!(eps_a[i] > 0.0)) throw DomainError("absolute tolerances must be positive");
    }
};

struct StageSolveResult {
    Vector g;
    int iterations = 0;
    double final_norm = 0.0;
};

using RhsFunction = std::function<Vector(const Vector&, double)>;
using JacobianFunction = std::function<Matrix(const Vector&, double)>;
// Solves g = E + gamma * s(g, t) where gamma = dt * Ahat_jj.
using StageSolver = std::function<StageSolveResult(const Vector& E, double gamma, double t, const NewtonConfig&)>;

struct SplitOdeProblem {
    std::string name;
    int dimension = 0;
    RhsFunction nonstiff;
    RhsFunction stiff;
    JacobianFunction stiff_jacobian;  // optional, finite differences otherwise
    bool stiff_is_linear = false;     // one Newton update is exact
    StageSolver stage_solver;         // optional problem-specific reduction
    std::function<Vector(double)> exact_solution;
    Vector initial_state;
    double t0 = 0.0;
    Vector abs_tol;  // default eps_a
    std::vector<std::string> component_names;
};

inline double wrms_norm(const Vector& delta, const Vector& x, double eps_r, const Vector& eps_a) {
    const Eigen::Index n = delta.size();
    if (x.size() != n || eps_a.size() != n) throw DomainError("wrms_norm: length mismatch");
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) {
        const double w = eps_r * std::abs(x[l]) + eps_a[l];
        if (!(w > 0.0)) throw DomainError("wrms_norm: nonpositive weight");
        const double v = delta[l] / w;
        sum += v * v;
    }
    return std::sqrt(sum / static_cast<double>(n));
}

inline Vector resolve_abs_tol(const SplitOdeProblem& p, const NewtonConfig& cfg) {
    if (cfg.eps_a.size() == p.dimension) return cfg.eps_a;
    if (cfg.eps_a.size() != 0) throw DomainError("eps_a has wrong length");
    if (p.abs_tol.size() == p.dimension) return p.abs_tol;
    return Vector::Constant(p.dimension, cfg.eps_r);
}

inline Matrix finite_difference_jacobian(const RhsFunction& f, const Vector& x, double t) {
    const Eigen::Index n = x.size();
    Matrix J(n, n);
    Vector xp = x, xm = x;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        J.col(j) = (f(xp, t) - f(xm, t)) / (2.0 * h);
        xp[j] = xm[j] = x[j];
    }
    return J;
}

// Convergence control shared by the generic and problem-specific Newton loops.
class NewtonMonitor {
public:
    NewtonMonitor(const NewtonConfig& cfg) : cfg_(cfg) {}

    // Returns true when R * ||delta|| < epsilon.
    bool converged(double norm) {
        ++k_;
        if (k_ > 1) rate_ = std::max(cfg_.rate_floor * rate_, prev_ > 0.0 ? norm / prev_ : 0.0);
        prev_ = norm;
        last_ = norm;
        return rate_ * norm < cfg_.epsilon;
    }
    bool exhausted() const { return k_ >= cfg_.max_iters; }
    int iterations() const { return k_; }
    double last_norm() const { return last_; }

private:
    const NewtonConfig& cfg_;
    int k_ = 0;
    double rate_ = 1.0;
    double prev_ = 0.0;
    double last_ = 0.0;
};

inline StageSolveResult generic_newton_stage(const SplitOdeProblem& p, const Vector& E, double gamma, double t_stage,
                                             const NewtonConfig& cfg) {
    cfg.validate();
    const Vector eps_a = resolve_abs_tol(p, cfg);
    const Eigen::Index n = E.size();
    Vector g = E;
    NewtonMonitor mon(cfg);
    for (;;) {
        const Vector F = g - E - gamma * p.stiff(g, t_stage);
        const Matrix Js = p.stiff_jacobian ? p.stiff_jacobian(g, t_stage) : finite_difference_jacobian(p.stiff, g, t_stage);
        const Matrix J = Matrix::Identity(n, n) - gamma * Js;
        const auto lu = J.fullPivLu();
        if (!lu.isInvertible()) throw SolverError("singular stage Jacobian");
        const Vector delta = lu.solve(-F);
        const double norm = wrms_norm(delta, g, cfg.eps_r, eps_a);
        g += delta;
        if (!g.allFinite()) throw SolverError("non-finite Newton iterate");
        if (p.stiff_is_linear || mon.converged(norm)) {
            return {g, std::max(1, mon.iterations()), norm};
        }
        if (mon.exhausted())
            throw ConvergenceError("Newton did not converge in " + std::to_string(cfg.max_iters) +
                                       " iterations, final norm " + fmt17(norm),
                                   mon.iterations(), norm);
    }
}

inline StageSolveResult newton_stage(const SplitOdeProblem& p, const Vector& E, double ahat_jj, double dt,
                                     double t_stage, const NewtonConfig& cfg) {
    if (ahat_jj == 0.0) throw DomainError("newton_stage needs a nonzero diagonal entry");
    const double gamma = dt * ahat_jj;
    if (p.stage_solver) return p.stage_solver(E, gamma, t_stage, cfg);
    return generic_newton_stage(p, E, gamma, t_stage, cfg);
}

struct StepStats {
    long steps = 0;
    long n_evals = 0;
    long s_evals = 0;
    long implicit_solves = 0;
    long newton_iterations = 0;
};

class ImexStepper {
public:
    ImexStepper(DoubleTableau t, const SplitOdeProblem& p, NewtonConfig cfg = {})
        : t_(std::move(t)), p_(p), cfg_(std::move(cfg)) {
        const auto& ex = t_.explicit_part();
        const auto& im = t_.implicit_part();
        const int r = t_.stages();
        fsal_ = t_.is_fsal() && im.A()(0, 0) == 0.0 && ex.A().row(0).isZero() && im.A().row(0).isZero() &&
                im.A()(r - 1, r - 1) == 0.0 && ex.c()[r - 1] == 1.0 && im.c()[r - 1] == 1.0;
        n_.resize(r);
        s_.resize(r);
    }

    bool uses_fsal() const { return fsal_; }
    const StepStats& stats() const { return stats_; }
    int last_newton_iterations() const { return last_iters_; }
    void reset() {
        cache_valid_ = false;
        stats_ = {};
    }

    Vector step(const Vector& x, double t, double dt) {
        if (!(dt > 0.0)) throw DomainError("step size must be positive");
        const auto& A = t_.explicit_part().A();
        const auto& Ah = t_.implicit_part().A();
        const auto& c = t_.explicit_part().c();
        const auto& ch = t_.implicit_part().c();
        const int r = t_.stages();
        last_iters_ = 0;
        Vector g;
        for (int j = 0; j < r; ++j) {
            if (j == 0 && fsal_ && cache_valid_ && same_time(cache_t_, t) && cache_x_.size() == x.size() && cache_x_ == x) {
                n_[0] = cache_n_;
                s_[0] = cache_s_;
                continue;
            }
            Vector E = x;
            for (int k = 0; k < j; ++k) {
                if (A(j, k) != 0.0) E += (dt * A(j, k)) * n_[k];
                if (Ah(j, k) != 0.0) E += (dt * Ah(j, k)) * s_[k];
            }
            if (Ah(j, j) != 0.0) {
                try {
                    auto res = newton_stage(p_, E, Ah(j, j), dt, t + ch[j] * dt, cfg_);
                    g = std::move(res.g);
                    last_iters_ += res.iterations;
                    stats_.newton_iterations += res.iterations;
                    ++stats_.implicit_solves;
                } catch (const Error& e) {
                    throw StepError(std::string("stage ") + std::to_string(j + 1) + ": " + e.what(), stats_.steps, j + 1);
                }
            } else {
                g = std::move(E);
            }
            try {
                n_[j] = p_.nonstiff(g, t + c[j] * dt);
                s_[j] = p_.stiff(g, t + ch[j] * dt);
            } catch (const Error& e) {
                throw StepError(std::string("stage ") + std::to_string(j + 1) + ": " + e.what(), stats_.steps, j + 1);
            }
            ++stats_.n_evals;
            ++stats_.s_evals;
        }
        // Same accumulation as the last stage, so for FSAL tableaux x_{m+1} equals g_r bitwise.
        Vector out = x;
        const auto& b = t_.explicit_part().b();
        const auto& bh = t_.implicit_part().b();
        for (int k = 0; k < r; ++k) {
            if (b[k] != 0.0) out += (dt * b[k]) * n_[k];
            if (bh[k] != 0.0) out += (dt * bh[k]) * s_[k];
        }
        if (fsal_) {
            cache_valid_ = true;
            cache_t_ = t + dt;
            cache_x_ = out;
            cache_n_ = n_[r - 1];
            cache_s_ = s_[r - 1];
        }
        ++stats_.steps;
        return out;
    }

    // Call when the next step does not start from the last output.
    void invalidate_cache() { cache_valid_ = false; }

private:
    // t_m + dt and t_0 + (m+1) dt can differ in the last bits.
    static bool same_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

    DoubleTableau t_;
    SplitOdeProblem p_;
    NewtonConfig cfg_;
    bool fsal_ = false;
    std::vector<Vector> n_, s_;
    bool cache_valid_ = false;
    double cache_t_ = 0.0;
    Vector cache_x_, cache_n_, cache_s_;
    StepStats stats_;
    int last_iters_ = 0;
};

inline Vector imex_step(const DoubleTableau& t, const SplitOdeProblem& p, const Vector& x, double tm, double dt,
                        const NewtonConfig& cfg = {}) {
    ImexStepper st(t, p, cfg);
    return st.step(x, tm, dt);
}

struct Trajectory {
    std::vector<double> t;
    std::vector<Vector> x;
    std::vector<int> newton_iterations;  // per step
    StepStats stats;
    std::optional<double> final_error;   // max norm against exact_solution

    const Vector& final_state() const { return x.back(); }
};

struct IntegrateOptions {
    int record_every = 1;
    double blowup_factor = 1e12;
};

inline Trajectory integrate(const DoubleTableau& tab, const SplitOdeProblem& p, const Vector& x0, double t0,
                            double t_end, double dt, const NewtonConfig& cfg = {}, IntegrateOptions opt = {}) {
    if (!(dt > 0.0) || !(t_end >= t0)) throw DomainError("integrate needs dt > 0 and t_end >= t0");
    const double span = t_end - t0;
    long nsteps = std::lround(span / dt);
    bool shortened = false;
    if (std::abs(nsteps * dt - span) > 1e-10 * std::max(span, dt)) {
        nsteps = static_cast<long>(std::floor(span / dt)) + 1;
        shortened = true;
    }
    ImexStepper st(tab, p, cfg);
    Trajectory tr;
    tr.t.push_back(t0);
    tr.x.push_back(x0);
    const double x0n = x0.norm();
    const double limit = opt.blowup_factor * (x0n > 0.0 ? x0n : 1.0);
    Vector x = x0;
    for (long m = 0; m < nsteps; ++m) {
        const double tm = t0 + m * dt;
        const double h = (m == nsteps - 1) ? t_end - tm : dt;
        if (h <= 0.0) break;
        if (shortened && m == nsteps - 1) st.invalidate_cache();
        try {
            x = st.step(x, tm, h);
        } catch (const StepError& e) {
            throw StepError(std::string("step ") + std::to_string(m) + ", " + e.what(), m, e.stage());
        }
        tr.newton_iterations.push_back(st.last_newton_iterations());
        const double xn = x.norm();
        if (!std::isfinite(xn) || xn > limit)
            throw BlowUpError("solution norm exceeded blow-up threshold at step " + std::to_string(m), m, 0);
        if ((m + 1) % opt.record_every == 0 || m == nsteps - 1) {
            tr.t.push_back(m == nsteps - 1 ? t_end : t0 + (m + 1) * dt);
            tr.x.push_back(x);
        }
    }
    tr.stats = st.stats();
    if (p.exact_solution) tr.final_error = (x - p.exact_solution(t_end)).cwiseAbs().maxCoeff();
    return tr;
}

struct ConvergenceRow {
    double dt;
    double error;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double fitted_order = 0.0;
    int max_newton_iterations = 0;
};

inline double fit_order(const std::vector<ConvergenceRow>& rows) {
    const double n = static_cast<double>(rows.size());
    if (rows.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
        const double lx = std::log(r.dt), ly = std::log(r.error);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Reference: exact_solution when available, else a self-reference with dt_min / reference_factor.
inline ConvergenceTable convergence_study(const DoubleTableau& tab, const SplitOdeProblem& p, std::vector<double> dts,
                                          double t_end, const NewtonConfig& cfg = {}, int reference_factor = 256) {
    if (dts.empty()) throw DomainError("empty step list");
    std::sort(dts.begin(), dts.end(), std::greater<>());
    for (std::size_t i = 1; i < dts.size(); ++i)
        if (!(dts[i] < dts[i - 1])) throw DomainError("step sizes must be distinct");
    const Vector& x0 = p.initial_state;
    Vector ref;
    if (p.exact_solution) {
        ref = p.exact_solution(t_end);
    } else {
        if (reference_factor < 100) throw DomainError("reference step must be at least 100x smaller");
        ref = integrate(tab, p, x0, p.t0, t_end, dts.back() / reference_factor, cfg).final_state();
    }
    ConvergenceTable table;
    for (double dt : dts) {
        const auto tr = integrate(tab, p, x0, p.t0, t_end, dt, cfg);
        table.rows.push_back({dt, (tr.final_state() - ref).cwiseAbs().maxCoeff()});
        for (int k : tr.newton_iterations) table.max_newton_iterations = std::max(table.max_newton_iterations, k);
    }
    table.fitted_order = fit_order(table.rows);
    return table;
}

inline void write_trajectory_csv(const Trajectory& tr, const SplitOdeProblem& p, std::ostream& os) {
    os << 't';
    const Eigen::Index d = tr.x.empty() ? 0 : tr.x.front().size();
    for (Eigen::Index i = 0; i < d; ++i)
        os << ',' << (static_cast<std::size_t>(i) < p.component_names.size() ? p.component_names[i] : "x" + std::to_string(i));
    os << '\n';
    for (std::size_t m = 0; m < tr.t.size(); ++m) {
        os << fmt17(tr.t[m]);
        for (Eigen::Index i = 0; i < d; ++i) os << ',' << fmt17(tr.x[m][i]);
        os << '\n';
    }
}

inline void write_convergence_csv(const ConvergenceTable& table, std::ostream& os) {
    os << "dt,error\n";
    for (const auto& r : table.rows) os << fmt17(r.dt) << ',' << fmt17(r.error) << '\n';
}

}  // namespace imkg
