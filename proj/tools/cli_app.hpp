#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imkg/imkg.hpp"

namespace imkg::cli {

struct ResolvedMethod {
    DoubleTableau tableau;
    const RegistryEntry* entry = nullptr;  // null for tableau files
};

inline ResolvedMethod resolve_method(const std::string& name) {
    try {
        const auto& e = lookup(name);
        return {e.tableau(), &e};
    } catch (const NotFoundError&) {
        if (std::filesystem::is_regular_file(name)) return {read_tableau_file(name), nullptr};
        throw;
    }
}

class UsageError : public Error {
public:
    using Error::Error;
};

struct ProblemFlags {
    double kx = 1.0;
    double kz = 10.0;
    double ln_re = 0.0, ln_im = 1.0, ls_re = -1.0, ls_im = 0.0;
    int levels = 20;
    double amplitude = 0.01;
};

inline SplitOdeProblem make_problem(const std::string& kind, const ProblemFlags& f) {
    if (kind == "hevi") return hevi_problem(f.kx, f.kz);
    if (kind == "dahlquist") return dahlquist_split({f.ln_re, f.ln_im}, {f.ls_re, f.ls_im});
    if (kind == "column") {
        auto p = acoustic_column(ColumnBackground::isothermal(f.levels));
        p.initial_state = perturbed_column_state(AcousticColumn(ColumnBackground::isothermal(f.levels)), f.amplitude);
        return p;
    }
    throw UsageError("unknown problem '" + kind + "' (expected hevi, dahlquist or column)");
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) {
        if (path.empty() || path == "-") {
            os_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw Error("cannot open " + path + " for writing");
            os_ = file_.get();
        }
    }
    std::ostream& operator*() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_ = nullptr;
};

inline const char* yn(bool b) { return b ? "Y" : "N"; }

inline int methods_list(std::ostream& out) {
    out << "name,claimed_order,classified_order,q,implicit_stages,as_printed_inconsistent\n";
    for (const auto& e : registry()) {
        const auto t = e.tableau();
        out << e.name() << ',' << e.raw.p << ',' << classify_order(t) << ',' << e.normalized.coefficients.q << ','
            << t.implicit_stage_count() << ',' << (e.normalized.as_printed_inconsistent ? "yes" : "no") << '\n';
    }
    return 0;
}

inline void print_stability(const StabilityReport& s, std::ostream& out) {
    out << "I or A: " << (s.a_stable ? "A" : s.i_stable ? "I" : "-") << "  VI: " << yn(s.vi) << "  SD: " << yn(s.sd)
        << "  L-stable: " << yn(s.l_stable) << '\n';
    out << "I-stability basis: " << s.i_basis;
    if (s.i_basis == "sampled") out << " (sufficient test not conclusive)";
    out << "\ngamma: " << fmt17(s.gamma[0]) << ' ' << fmt17(s.gamma[1]) << ' ' << fmt17(s.gamma[2]) << '\n';
    out << "sup |Rhat(iy)| sampled: " << fmt17(s.sampled_sup) << '\n';
    out << "deg Phat: " << s.phat_degree << "  implicit stages: " << s.implicit_stages
        << "  |Rhat(inf)|: " << fmt17(s.r_infinity) << '\n';
    out << "explicit imaginary-axis limit: " << fmt17(s.r0) << " (" << to_string(s.kg_class) << ")\n";
    if (!s.diagnostic.empty()) out << "diagnostic: " << s.diagnostic << '\n';
}

inline int methods_check(const std::string& name, std::ostream& out, std::ostream& err) {
    const auto m = resolve_method(name);
    const int claimed = m.entry ? m.entry->raw.p : 3;
    const auto rep = check_order_general(m.tableau, claimed);
    out << "method: " << m.tableau.name() << '\n';
    if (m.entry) out << "claimed order: " << claimed << '\n';
    out << "order: " << classify_order(m.tableau) << '\n';
    out << "residuals (tolerance " << fmt17(rep.tolerance) << "):\n";
    for (const auto& r : rep.residuals) out << "  " << r.id << ' ' << fmt17(r.value) << '\n';
    print_stability(stability_report(m.tableau), out);
    if (m.entry) {
        for (const auto& a : m.entry->normalized.applied) out << "normalization: " << a << '\n';
        if (m.entry->normalized.as_printed_inconsistent) {
            err << m.entry->name() << ": as_printed_inconsistent; violated:";
            for (const auto& v : m.entry->normalized.violations) err << ' ' << v;
            err << '\n';
            out << "as_printed_inconsistent: yes\n";
            return 1;
        }
    }
    return 0;
}

inline int stability_poly(const std::string& name, std::ostream& out) {
    const auto m = resolve_method(name);
    const auto P = explicit_polynomial_general(m.tableau.explicit_part());
    const double r0 = imaginary_axis_limit(P);
    const auto R = implicit_stability_function(m.tableau.implicit_part());
    out << "explicit: " << join17(P.coefficients(), " ") << '\n';
    out << "r0: " << fmt17(r0) << '\n';
    out << "class: " << to_string(classify_kg(P, r0)) << '\n';
    out << "implicit numerator: " << join17(R.numerator.coefficients(), " ") << '\n';
    out << "implicit denominator roots: " << join17(R.denominator_roots, " ") << '\n';
    return 0;
}

inline std::string usage_text(CLI::App& app) { return app.help(); }

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"IMKG IMEX Runge-Kutta tools", "imkg"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    auto* methods = app.add_subcommand("methods", "Built-in methods");
    methods->require_subcommand(1);
    auto* m_list = methods->add_subcommand("list", "List registry methods");
    std::string method;
    auto* m_check = methods->add_subcommand("check", "Order and stability report");
    m_check->add_option("name", method, "Registry name or tableau file")->required();

    auto* stab = app.add_subcommand("stability", "Linear and H-stability");
    stab->require_subcommand(1);
    auto* s_poly = stab->add_subcommand("poly", "Stability polynomials");
    s_poly->add_option("name", method)->required();
    auto* s_hmap = stab->add_subcommand("hmap", "Spectral radius grid as CSV");
    s_hmap->add_option("name", method)->required();
    std::optional<double> xmax;
    double zmax = 50.0;
    int nx = 401, nz = 501;
    std::vector<double> extra_z;
    std::string output;
    s_hmap->add_option("--xmax", xmax, "Default: explicit axis limit + 0.5");
    s_hmap->add_option("--zmax", zmax)->capture_default_str();
    s_hmap->add_option("--nx", nx)->capture_default_str()->check(CLI::PositiveNumber);
    s_hmap->add_option("--nz", nz)->capture_default_str()->check(CLI::PositiveNumber);
    s_hmap->add_option("--extra-z", extra_z, "Additional z samples")->delimiter(',');
    s_hmap->add_option("-o,--output", output);
    auto* s_region = stab->add_subcommand("region", "T containment and minimal cone slope");
    s_region->add_option("name", method)->required();
    double n0 = 0.0;
    s_region->add_option("--n0", n0)->required();

    auto* derive = app.add_subcommand("derive", "Method construction");
    derive->require_subcommand(1);
    auto* d_q4 = derive->add_subcommand("imkg3q4", "Third-order q = 4 construction");
    double d2 = 1.0, d3 = 1.0, alpha2 = 2.0 / 3.0, beta1 = 0.0;
    std::string derived_name = "IMKG3q4";
    d_q4->add_option("--d2", d2)->required();
    d_q4->add_option("--d3", d3)->required();
    d_q4->add_option("--alpha2", alpha2)->required();
    d_q4->add_option("--beta1", beta1)->required();
    d_q4->add_option("--name", derived_name)->capture_default_str();
    d_q4->add_option("-o,--output", output);

    ProblemFlags pf;
    std::string problem;
    double dt = 0.0;
    std::optional<double> tend;
    std::vector<double> dts;
    auto add_problem_flags = [&](CLI::App* sub) {
        sub->add_option("problem", problem, "hevi, dahlquist or column")->required();
        sub->add_option("name", method)->required();
        sub->add_option("--tend", tend, "Default: 1 (hevi, dahlquist), 50 (column)");
        sub->add_option("--kx", pf.kx)->capture_default_str();
        sub->add_option("--kz", pf.kz)->capture_default_str();
        sub->add_option("--lambda-n-re", pf.ln_re)->capture_default_str();
        sub->add_option("--lambda-n-im", pf.ln_im)->capture_default_str();
        sub->add_option("--lambda-s-re", pf.ls_re)->capture_default_str();
        sub->add_option("--lambda-s-im", pf.ls_im)->capture_default_str();
        sub->add_option("--levels", pf.levels)->capture_default_str();
        sub->add_option("--amplitude", pf.amplitude)->capture_default_str();
        sub->add_option("-o,--output", output);
    };
    auto* integ = app.add_subcommand("integrate", "Integrate a model problem, trajectory CSV");
    add_problem_flags(integ);
    integ->add_option("--dt", dt)->required()->check(CLI::PositiveNumber);
    auto* conv = app.add_subcommand("converge", "Convergence study, dt/error CSV");
    add_problem_flags(conv);
    conv->add_option("--dts", dts)->required()->delimiter(',');

    std::vector<std::string> argv_store{"imkg"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*m_list) return methods_list(out);
        if (*m_check) return methods_check(method, out, err);
        if (*s_poly) return stability_poly(method, out);
        if (*s_hmap) {
            const auto m = resolve_method(method);
            const double xm = xmax ? *xmax : default_window(m.tableau).x_max;
            const auto g = scan_grid(m.tableau, xm, zmax, nx, nz, extra_z);
            Output o(output, out);
            write_grid_csv(g, *o);
            return 0;
        }
        if (*s_region) {
            const auto m = resolve_method(method);
            auto w = default_window(m.tableau);
            w.x_max = std::max(w.x_max, n0);
            const auto g = scan_grid(m.tableau, w);
            out << "n0: " << fmt17(n0) << '\n';
            out << "T contained: " << (region_T_contained(g, n0) ? "yes" : "no") << '\n';
            try {
                const auto gm = min_gamma(g, n0);
                out << "gamma_min: " << (gm ? fmt17(*gm) : std::string("none")) << '\n';
            } catch (const DomainError& e) {
                out << "gamma_min: undefined (" << e.what() << ")\n";
            }
            out << "stable column width: " << fmt17(stable_column_width(g)) << '\n';
            return 0;
        }
        if (*d_q4) {
            const auto k = derive_imkg3_q4(d2, d3, alpha2, beta1);
            const auto t = expand_imkg(k, derived_name);
            err << "alpha: " << join17(k.alpha, " ") << "\nbeta: " << join17(k.beta, " ")
                << "\nalphahat: " << join17(k.alpha_hat, " ") << "\nbetahat: " << join17(k.beta_hat, " ")
                << "\ndhat: " << join17(k.delta_hat, " ") << '\n';
            Output o(output, out);
            write_tableau(t, *o);
            return 0;
        }
        if (*integ || *conv) {
            const auto m = resolve_method(method);
            const auto p = make_problem(problem, pf);
            const double t_end = tend ? *tend : (problem == "column" ? 50.0 : 1.0);
            if (*integ) {
                const auto tr = integrate(m.tableau, p, p.initial_state, p.t0, t_end, dt);
                Output o(output, out);
                write_trajectory_csv(tr, p, *o);
                if (tr.final_error) err << "final error: " << fmt17(*tr.final_error) << '\n';
                return 0;
            }
            const auto table = convergence_study(m.tableau, p, dts, t_end);
            Output o(output, out);
            write_convergence_csv(table, *o);
            err << "fitted order: " << fmt17(table.fitted_order) << '\n';
            return 0;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n' << usage_text(app);
        return 2;
    } catch (const NotFoundError& e) {
        err << "error: " << e.what() << '\n' << usage_text(app);
        return 2;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    err << usage_text(app);
    return 2;
}

}  // namespace imkg::cli
