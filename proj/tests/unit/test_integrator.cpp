#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "imkg/integrator.hpp"
#include "imkg/problems.hpp"
#include "imkg/registry.hpp"

using namespace imkg;
using cd = std::complex<double>;

namespace {

// Split Dahlquist amplification 1 + (zn b + zs bhat)^T (I - zn A - zs Ahat)^{-1} 1.
cd imex_amplification(const DoubleTableau& t, cd zn, cd zs) {
    const int r = t.stages();
    const Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(r, r) - zn * t.explicit_part().A().cast<cd>() -
                               zs * t.implicit_part().A().cast<cd>();
    const Eigen::VectorXcd k = M.partialPivLu().solve(Eigen::VectorXcd::Ones(r));
    const Eigen::VectorXcd w = zn * t.explicit_part().b().cast<cd>() + zs * t.implicit_part().b().cast<cd>();
    return 1.0 + (w.transpose() * k)(0);
}

SplitOdeProblem cubic_problem(double stiffness = 50.0) {
    SplitOdeProblem p;
    p.name = "cubic";
    p.dimension = 1;
    p.nonstiff = [](const Vector& x, double) { return Vector(Vector::Constant(1, std::sin(x[0]))); };
    p.stiff = [stiffness](const Vector& x, double) {
        return Vector(Vector::Constant(1, -stiffness * x[0] * x[0] * x[0]));
    };
    p.initial_state = Vector::Constant(1, 1.0);
    return p;
}

}  // namespace

TEST(Newton, WrmsNorm) {
    Vector d(2), x(2), a(2);
    d << 1.0, 2.0;
    x << 10.0, 0.0;
    a << 1.0, 2.0;
    // weights 0.1*10 + 1 = 2 and 2
    EXPECT_DOUBLE_EQ(wrms_norm(d, x, 0.1, a), std::sqrt((0.25 + 1.0) / 2.0));
}

TEST(Newton, MonitorRule) {
    NewtonConfig cfg;
    cfg.epsilon = 0.1;
    NewtonMonitor mon(cfg);
    EXPECT_FALSE(mon.converged(1.0));   // R = 1
    EXPECT_FALSE(mon.converged(0.5));   // R = max(0.3, 0.5) = 0.5, 0.25
    EXPECT_TRUE(mon.converged(0.1));    // R = max(0.15, 0.2) = 0.2, 0.02
    EXPECT_EQ(mon.iterations(), 3);
}

TEST(Newton, ConfigValidation) {
    NewtonConfig cfg;
    cfg.epsilon = 0.0;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = {};
    cfg.eps_a = Vector::Constant(2, -1.0);
    EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Newton, SolvesNonlinearStage) {
    const auto p = cubic_problem();
    NewtonConfig cfg;
    cfg.epsilon = 1e-6;
    const Vector E = Vector::Constant(1, 1.0);
    const auto res = newton_stage(p, E, 0.5, 0.2, 0.0, cfg);
    const double g = res.g[0];
    EXPECT_NEAR(g - 1.0 + 0.1 * 50.0 * g * g * g, 0.0, 1e-8);
    EXPECT_GT(res.iterations, 1);
}

TEST(Newton, NonConvergenceIsReported) {
    const auto p = cubic_problem();
    NewtonConfig cfg;
    cfg.epsilon = 1e-12;
    cfg.max_iters = 2;
    try {
        newton_stage(p, Vector::Constant(1, 1.0), 1.0, 1.0, 0.0, cfg);
        FAIL();
    } catch (const ConvergenceError& e) {
        EXPECT_EQ(e.iterations(), 2);
        EXPECT_GT(e.final_norm(), 0.0);
    }
}

TEST(Newton, LinearStiffPartTakesOneUpdate) {
    auto p = dahlquist_split({0.0, 1.0}, {-100.0, 0.0});
    const auto res = newton_stage(p, p.initial_state, 0.5, 0.1, 0.0, {});
    EXPECT_EQ(res.iterations, 1);
    EXPECT_NEAR(res.g[0], 1.0 / (1.0 + 5.0), 1e-15);
}

TEST(Newton, FiniteDifferenceJacobian) {
    const auto p = cubic_problem();
    const Matrix J = finite_difference_jacobian(p.stiff, Vector::Constant(1, 0.7), 0.0);
    EXPECT_NEAR(J(0, 0), -150.0 * 0.49, 1e-6);
}

TEST(Integrator, DahlquistStepMatchesAmplificationFactor) {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(-3.0, 3.0), v(-5.0, 0.0);
    for (const auto& e : registry()) {
        const auto t = e.tableau();
        for (int trial = 0; trial < 5; ++trial) {
            const cd ln(0.0, u(rng)), ls(v(rng), u(rng));
            const double dt = 0.3;
            const auto p = dahlquist_split(ln, ls);
            const Vector x1 = imex_step(t, p, p.initial_state, 0.0, dt);
            const cd ref = imex_amplification(t, ln * dt, ls * dt);
            EXPECT_NEAR(x1[0], ref.real(), 1e-12 * std::max(1.0, std::abs(ref))) << e.name();
            EXPECT_NEAR(x1[1], ref.imag(), 1e-12 * std::max(1.0, std::abs(ref))) << e.name();
        }
    }
}

TEST(Integrator, FsalSavesOneEvaluationPerStepAndIsBitwiseNeutral) {
    const auto t = lookup("IMKG232a").tableau();
    const auto p = cubic_problem();
    ImexStepper fsal(t, p), plain(t, p);
    ASSERT_TRUE(fsal.uses_fsal());
    Vector a = p.initial_state, b = p.initial_state;
    const int steps = 20;
    for (int m = 0; m < steps; ++m) {
        a = fsal.step(a, 0.01 * m, 0.01);
        plain.invalidate_cache();
        b = plain.step(b, 0.01 * m, 0.01);
        ASSERT_EQ(a[0], b[0]);
    }
    EXPECT_EQ(fsal.stats().n_evals, 4 + (steps - 1) * 3);
    EXPECT_EQ(plain.stats().n_evals, 4 * steps);
}

TEST(Integrator, NonFsalPairEvaluatesEveryStage) {
    Matrix A = Matrix::Zero(2, 2), Ah = Matrix::Zero(2, 2);
    A(1, 0) = 1.0;
    Ah(1, 1) = 1.0;
    Vector b(2), bh(2);
    b << 0.5, 0.5;
    bh << 0.5, 0.5;
    const DoubleTableau t("pair", ButcherTableau(A, b), ButcherTableau(Ah, bh));
    const auto p = cubic_problem();
    ImexStepper st(t, p);
    EXPECT_FALSE(st.uses_fsal());
    Vector x = p.initial_state;
    for (int m = 0; m < 3; ++m) x = st.step(x, 0.1 * m, 0.1);
    EXPECT_EQ(st.stats().n_evals, 6);
}

TEST(Integrator, ShortenedLastStepLandsOnEndTime) {
    const auto p = dahlquist_split({0.0, 1.0}, {-1.0, 0.0});
    const auto tr = integrate(lookup("IMKG232a").tableau(), p, p.initial_state, 0.0, 1.0, 0.3);
    EXPECT_EQ(tr.stats.steps, 4);
    EXPECT_DOUBLE_EQ(tr.t.back(), 1.0);
    ASSERT_TRUE(tr.final_error.has_value());
    EXPECT_LT(*tr.final_error, 1e-2);
}

TEST(Integrator, BlowUpIsDetected) {
    const auto p = dahlquist_split({0.0, 0.0}, {0.0, 0.0});
    auto q = p;
    q.nonstiff = [](const Vector& x, double) { return Vector(1e3 * x); };
    EXPECT_THROW(integrate(lookup("IMKG232a").tableau(), q, q.initial_state, 0.0, 10.0, 0.1), BlowUpError);
}

TEST(Integrator, StageFailureCarriesStepAndStage) {
    auto p = dahlquist_split({0.0, 1.0}, {-1.0, 0.0});
    p.stiff = [](const Vector& x, double t) -> Vector {
        if (t > 0.25) throw DomainError("outside the model domain");
        return x;
    };
    try {
        integrate(lookup("IMKG232a").tableau(), p, p.initial_state, 0.0, 1.0, 0.2);
        FAIL();
    } catch (const StepError& e) {
        EXPECT_EQ(e.step(), 1);
        EXPECT_GE(e.stage(), 2);
    }
}

TEST(Integrator, FitOrderOnExactPowerLaw) {
    std::vector<ConvergenceRow> rows;
    for (double dt : {0.1, 0.05, 0.025}) rows.push_back({dt, 3.0 * dt * dt * dt});
    EXPECT_NEAR(fit_order(rows), 3.0, 1e-12);
}

TEST(Integrator, DahlquistConvergenceOrders) {
    const auto p = dahlquist_split({0.0, 2.0}, {-5.0, 1.0});
    const std::vector<double> dts{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
    EXPECT_NEAR(convergence_study(lookup("IMKG232a").tableau(), p, dts, 1.0).fitted_order, 2.0, 0.15);
    EXPECT_NEAR(convergence_study(lookup("IMKG343a").tableau(), p, dts, 1.0).fitted_order, 3.0, 0.2);
}

TEST(Integrator, SelfConvergenceWithoutExactSolution) {
    auto p = cubic_problem(2.0);
    const auto table = convergence_study(lookup("IMKG342a").tableau(), p, {0.2, 0.1, 0.05, 0.025}, 1.0);
    EXPECT_NEAR(table.fitted_order, 3.0, 0.3);
    EXPECT_GE(table.max_newton_iterations, 1);
    EXPECT_THROW(convergence_study(lookup("IMKG342a").tableau(), p, {0.1, 0.1}, 1.0), DomainError);
}

TEST(Integrator, CsvWriters) {
    const auto p = dahlquist_split({0.0, 1.0}, {-1.0, 0.0});
    const auto tr = integrate(lookup("IMKG232a").tableau(), p, p.initial_state, 0.0, 0.5, 0.25);
    std::ostringstream os;
    write_trajectory_csv(tr, p, os);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t,re,im");
    ConvergenceTable table;
    table.rows = {{0.5, 1e-3}};
    std::ostringstream cs;
    write_convergence_csv(table, cs);
    EXPECT_EQ(cs.str(), "dt,error\n0.5,0.001\n");
}
