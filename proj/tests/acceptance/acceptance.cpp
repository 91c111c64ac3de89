// Acceptance checks. Usage: imkg_acceptance [--criterion N]
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "imkg/imkg.hpp"

using namespace imkg;
using cd = std::complex<double>;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void note(const std::string& what) { notes.push_back("     " + what); }
};

std::string g(double v) { return fmt17(v); }

std::string short_g(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

Outcome criterion1() {
    Outcome o;
    const double tol = 1e-12;
    for (const char* name : {"IMKG232a", "IMKG232b", "IMKG242a", "IMKG242b", "IMKG252a", "IMKG252b", "IMKG253a",
                             "IMKG253b", "IMKG254b", "IMKG254c"}) {
        const auto rep = check_order2_general(lookup(name).tableau(), tol);
        std::string v;
        for (const auto& id : rep.violated()) v += " " + id;
        o.require(rep.passes(2), std::string(name) + " order 2, max residual " + short_g(rep.max_abs(2)) +
                                     (v.empty() ? "" : ", violated:" + v));
    }
    for (const char* name : {"IMKG342a", "IMKG343a", "IMKG353a"}) {
        const auto rep = check_order3_general(lookup(name).tableau(), tol);
        o.require(rep.passes(3), std::string(name) + " order 3, max residual " + short_g(rep.max_abs(3)));
    }
    for (const char* name : {"IMKG243a", "IMKG254a", "IMKG354a"}) {
        const auto& n = lookup(name).normalized;
        std::string v;
        for (const auto& id : n.violations) v += " [" + id + "]";
        o.require(n.as_printed_inconsistent && !n.violations.empty(),
                  std::string(name) + " flagged as_printed_inconsistent:" + (v.empty() ? " (not flagged)" : v));
    }
    return o;
}

Outcome criterion2() {
    Outcome o;
    const auto& ref = lookup("IMKG343a").normalized.coefficients;
    const auto P = explicit_polynomial_general(lookup("IMKG343a").tableau().explicit_part());
    const double expect[] = {1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0};
    double worst = 0.0;
    for (int m = 0; m <= 4; ++m) worst = std::max(worst, std::abs(P[m] - expect[m]));
    o.require(P.degree() == 4 && worst <= 1e-15,
              "explicit polynomial (1, 1, 1/2, 1/6, 1/24), max coefficient difference " + g(worst));

    const auto k = derive_imkg3_q4(1.0, 1.0, 2.0 / 3.0, 0.0);
    double diff = 0.0;
    for (int j = 1; j <= 4; ++j) diff = std::max({diff, std::abs(k.a(j) - ref.a(j)), std::abs(k.ah(j) - ref.ah(j))});
    for (int j = 1; j <= 3; ++j)
        diff = std::max({diff, std::abs(k.b(j) - ref.b(j)), std::abs(k.bh(j) - ref.bh(j)), std::abs(k.d(j) - ref.d(j))});
    o.require(diff <= 1e-12, "derive_imkg3_q4(1, 1, 2/3, 0) vs table coefficients, max difference " + g(diff));
    return o;
}

Outcome criterion3() {
    Outcome o;
    struct Case {
        const char* label;
        PolynomialTarget target;
        double expect;
    };
    const Case cases[] = {{"q=3 KGO", kgo3(), 2.0},
                          {"q=4 KGNO", kgno4(), 2.8284271},
                          {"q=5 KGO", kgo5(), 4.0},
                          {"q=5 KGNO", kgno5(), 3.8729833}};
    for (const auto& c : cases) {
        const double r0 = imaginary_axis_limit(c.target.polynomial());
        o.require(std::abs(r0 - c.expect) <= 1e-5 && r0 <= c.target.q - 1 + 1e-12,
                  std::string(c.label) + " r0 = " + g(r0) + " (expected " + short_g(c.expect) + ", bound " +
                      std::to_string(c.target.q - 1) + ")");
    }
    return o;
}

Outcome criterion4() {
    Outcome o;
    struct Row {
        char ia;
        bool vi, sd;
    };
    const std::map<std::string, Row> printed{
        {"IMKG232a", {'A', true, true}},   {"IMKG232b", {'A', true, true}},   {"IMKG242a", {'A', false, true}},
        {"IMKG242b", {'A', true, true}},   {"IMKG243a", {'A', true, true}},   {"IMKG252a", {'A', false, true}},
        {"IMKG252b", {'A', false, true}},  {"IMKG253a", {'A', true, true}},   {"IMKG253b", {'A', true, true}},
        {"IMKG254a", {'I', true, false}},  {"IMKG254b", {'I', true, false}},  {"IMKG254c", {'A', true, true}},
        {"IMKG342a", {'A', false, true}},  {"IMKG343a", {'I', true, false}},  {"IMKG353a", {'A', true, true}},
        {"IMKG354a", {'I', true, false}},
    };
    auto yn = [](bool b) { return b ? 'Y' : 'N'; };
    for (const auto& e : registry()) {
        if (e.normalized.as_printed_inconsistent) {
            o.note(e.name() + " skipped (as_printed_inconsistent)");
            continue;
        }
        const auto s = stability_report(e.tableau());
        const char ia = s.a_stable ? 'A' : s.i_stable ? 'I' : '-';
        const Row& r = printed.at(e.name());
        const bool ok = ia == r.ia && s.vi == r.vi && s.sd == r.sd;
        std::string line = e.name() + " computed " + ia + "/" + yn(s.vi) + "/" + yn(s.sd) + ", printed " + r.ia +
                           "/" + yn(r.vi) + "/" + yn(r.sd) + ", I basis " + s.i_basis;
        if (!s.diagnostic.empty()) line += ", " + s.diagnostic;
        o.require(ok, line);
    }
    return o;
}

Outcome criterion5() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    auto window = [](const DoubleTableau& t) {
        auto w = default_window(t);
        w.extra_z = {100.0, 1e3};
        return w;
    };
    const auto t232a = lookup("IMKG232a").tableau(), t232b = lookup("IMKG232b").tableau();
    const auto ga = scan_grid(t232a, window(t232a));
    const auto gb = scan_grid(t232b, window(t232b));
    const bool tb = region_T_contained(gb, 2.0), ta = region_T_contained(ga, 2.0);
    o.require(tb, "IMKG232b T_2 contained on the default window plus z in {100, 1e3}");
    o.require(!ta, "IMKG232a T_2 containment violated");
    const double wa = stable_column_width(ga), wb = stable_column_width(gb);
    const double ratio = wa / wb;
    o.require(ratio >= 0.35 && ratio <= 0.65,
              "stable column width ratio 232a/232b = " + short_g(wa) + "/" + short_g(wb) + " = " + short_g(ratio));

    const auto t252a = lookup("IMKG252a").tableau();
    auto w = window(t252a);
    w.x_max = std::max(w.x_max, 3.5);
    const auto g252 = scan_grid(t252a, w);
    std::optional<double> gm;
    std::string why;
    try {
        gm = min_gamma(g252, 3.5);
    } catch (const DomainError& e) {
        why = e.what();
    }
    o.require(gm && std::abs(*gm - 0.45) <= 0.1,
              "IMKG252a gamma_min at n0 = 3.5: " +
                  (gm ? short_g(*gm) : why.empty() ? std::string("none (unstable at the largest sampled z)") : why));
    const auto t252b = lookup("IMKG252b").tableau();
    auto wb2 = window(t252b);
    wb2.x_max = std::max(wb2.x_max, 3.5);
    try {
        const auto g2 = min_gamma(scan_grid(t252b, wb2), 3.5);
        o.note("for reference, IMKG252b gamma_min at n0 = 3.5: " + (g2 ? short_g(*g2) : std::string("none")));
    } catch (const DomainError& e) {
        o.note(std::string("IMKG252b gamma_min undefined: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < 60.0, "scans finished in " + short_g(secs) + " s");
    return o;
}

Outcome criterion6() {
    Outcome o;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> ux(0.0, 5.0), uz(0.0, 100.0);
    for (const auto& e : registry()) {
        const auto t = e.tableau();
        const auto P = explicit_polynomial_general(t.explicit_part());
        const auto R = implicit_stability_function(t.implicit_part());
        double worst = 0.0;
        for (int s = 0; s < 50; ++s) {
            const double x = ux(rng), z = uz(rng);
            worst = std::max(worst, std::abs(hstability_radius(t, x, 0.0) - std::max(1.0, std::abs(P(cd(0.0, x))))));
            worst = std::max(worst, std::abs(hstability_radius(t, 0.0, z) - std::max(1.0, std::abs(R(cd(0.0, z))))));
        }
        o.require(worst <= 1e-10, e.name() + " max axis deviation " + g(worst));
    }
    return o;
}

Outcome criterion7() {
    Outcome o;
    const auto p = hevi_problem(1.0, 10.0);
    std::vector<double> dts;
    for (int k = 3; k <= 9; ++k) dts.push_back(std::ldexp(1.0, -k));
    const std::pair<const char*, int> methods[] = {{"IMKG232a", 2}, {"IMKG232b", 2}, {"IMKG252b", 2},
                                                   {"IMKG342a", 3}, {"IMKG343a", 3}, {"IMKG353a", 3}};
    for (const auto& [name, order] : methods) {
        const auto table = convergence_study(lookup(name).tableau(), p, dts, 1.0);
        std::string local;
        for (std::size_t i = 1; i < table.rows.size(); ++i)
            local += " " + short_g(std::log(table.rows[i - 1].error / table.rows[i].error) / std::log(2.0));
        o.require(std::abs(table.fitted_order - order) <= 0.25,
                  std::string(name) + " fitted order " + short_g(table.fitted_order) + " (p = " +
                      std::to_string(order) + "), finest error " + short_g(table.rows.back().error) +
                      ", pairwise orders" + local);
    }
    return o;
}

Outcome criterion8() {
    Outcome o;
    const auto bg = ColumnBackground::isothermal(20);
    const AcousticColumn col(bg);
    auto p = acoustic_column(bg);
    const auto tab = lookup("IMKG232a").tableau();

    const Vector xh = col.hydrostatic_state();
    const auto tr = integrate(tab, p, xh, 0.0, 100.0, 1.0);
    const double drift = (tr.final_state() - xh).cwiseAbs().maxCoeff() / xh.cwiseAbs().maxCoeff();
    o.require(drift <= 1e-10, "hydrostatic drift over 100 steps (relative) " + g(drift));

    const Vector xp = perturbed_column_state(col, 0.05);
    const Vector E = xp + 0.3 * col.stiff(xp);
    NewtonConfig tight;
    tight.epsilon = 1e-8;
    tight.eps_r = 1e-10;
    const auto reduced = newton_stage(p, E, 0.5, 1.0, 0.0, tight);
    auto dense_p = p;
    dense_p.stage_solver = nullptr;
    const auto dense = newton_stage(dense_p, E, 0.5, 1.0, 0.0, tight);
    const double sdiff = (reduced.g - dense.g).cwiseAbs().maxCoeff();
    o.require(sdiff <= 1e-10, "reduced vs dense stage solve (L = 20) max difference " + g(sdiff));

    const Matrix J = col.stiff_jacobian(xh).block(0, 0, col.dimension() - 1, col.dimension() - 1);
    const auto ev = Eigen::EigenSolver<Matrix>(J).eigenvalues();
    double max_re = 0.0, max_im = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        max_re = std::max(max_re, std::abs(ev[i].real()));
        max_im = std::max(max_im, std::abs(ev[i].imag()));
    }
    o.require(max_re < 1e-8 * max_im, "linearized spectrum max |Re| " + g(max_re) + ", max |Im| " + g(max_im));

    p.initial_state = perturbed_column_state(col, 0.01);
    const auto table = convergence_study(tab, p, {2.0, 1.0, 0.5, 0.25}, 50.0);
    std::string rows;
    for (const auto& r : table.rows) rows += " " + short_g(r.dt) + ":" + short_g(r.error);
    o.require(std::abs(table.fitted_order - 2.0) <= 0.3,
              "IMKG232a column self-convergence order " + short_g(table.fitted_order) + " (errors" + rows +
                  ", max Newton iterations " + std::to_string(table.max_newton_iterations) + ")");
    return o;
}

Outcome criterion9() {
    Outcome o;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ukx(0.0, 5.0), ukz(0.0, 100.0), udt(0.01, 1.0);
    for (const auto& e : registry()) {
        const auto t = e.tableau();
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const double kx = ukx(rng), kz = ukz(rng), dt = udt(rng);
            const auto p = hevi_problem(kx, kz);
            const Vector x1 = imex_step(t, p, p.initial_state, 0.0, dt);
            const Eigen::Vector3cd ref = hstability_matrix(t, kx * dt, kz * dt) * to_complex3(p.initial_state);
            worst = std::max(worst, (to_complex3(x1) - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.norm()));
        }
        o.require(worst <= 1e-12, e.name() + " max step vs R_H difference " + g(worst));
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"order suite", criterion1},
        {"IMKG343a polynomial and construction", criterion2},
        {"imaginary-axis limits", criterion3},
        {"printed stability flags", criterion4},
        {"H-stability regions", criterion5},
        {"axis identities", criterion6},
        {"HEVI convergence orders", criterion7},
        {"acoustic column", criterion8},
        {"one-step equivalence", criterion9},
    };
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: imkg_acceptance [--criterion N]\n";
            return 2;
        }
    }
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::cerr << "criterion must be in 1.." << criteria.size() << '\n';
        return 2;
    }
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i) + 1 != only) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " C" << i + 1 << ' ' << criteria[i].first << '\n';
        for (const auto& n : o.notes) std::cout << "    " << n << '\n';
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
