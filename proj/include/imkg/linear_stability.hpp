#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "imkg/polynomial.hpp"
#include "imkg/tableau.hpp"

namespace imkg {

// P(z) with σ_0 = 1, ascending coefficients.
using StabilityPolynomial = Polynomial;

// R̂(z) = P̂(z) / Π_j (1 - z d_j), d_j the nonzero diagonal entries.
struct RationalStabilityFunction {
    Polynomial numerator;
    std::vector<double> denominator_roots;

    Polynomial denominator() const {
        Polynomial Q{1.0};
        for (double d : denominator_roots) Q = Q * Polynomial::one_minus(d);
        return Q;
    }

    std::complex<double> operator()(std::complex<double> z) const {
        std::complex<double> q = 1.0;
        for (double d : denominator_roots) q *= 1.0 - z * d;
        return numerator(z) / q;
    }

    int numerator_degree(double tol = 1e-12) const { return numerator.degree(tol); }
};

inline StabilityPolynomial explicit_polynomial_general(const ButcherTableau& t) {
    if (!t.is_strictly_lower()) throw ConstructionError("explicit polynomial needs a strictly lower triangular A");
    const int r = t.stages();
    const Matrix& A = t.A();
    std::vector<Polynomial> Y(r);
    for (int i = 0; i < r; ++i) {
        Polynomial sum{0.0};
        for (int j = 0; j < i; ++j)
            if (A(i, j) != 0.0) sum += A(i, j) * Y[j];
        Y[i] = Polynomial{1.0} + sum.times_z();
    }
    Polynomial sum{0.0};
    for (int j = 0; j < r; ++j)
        if (t.b()[j] != 0.0) sum += t.b()[j] * Y[j];
    return (Polynomial{1.0} + sum.times_z()).trimmed();
}

inline StabilityPolynomial imkg_explicit_polynomial(const ImkgCoefficients& k) {
    k.validate();
    const int q = k.q;
    std::vector<double> s(q + 1, 0.0);
    s[0] = 1.0;
    for (int m = 1; m <= q; ++m) {
        double prod = 1.0;
        for (int j = 0; j <= m - 2; ++j) prod *= k.a(q - j);
        s[m] = prod * (k.a(q - m + 1) + k.b(q - m));
    }
    return Polynomial(std::move(s)).trimmed();
}

// Stage numerators N_i over D_i = Π_{k<=i} f_k, f_k = 1 - z a_kk (1 when a_kk = 0).
inline RationalStabilityFunction implicit_stability_function(const ButcherTableau& t) {
    if (!t.is_lower()) throw ConstructionError("implicit stability function needs a lower triangular A");
    const int r = t.stages();
    const Matrix& A = t.A();
    std::vector<Polynomial> f(r), N(r);
    for (int i = 0; i < r; ++i) f[i] = A(i, i) != 0.0 ? Polynomial::one_minus(A(i, i)) : Polynomial{1.0};
    auto span = [&](int from, int to) {  // Π_{from<=k<=to} f_k
        Polynomial p{1.0};
        for (int k = from; k <= to; ++k) p = p * f[k];
        return p;
    };
    for (int i = 0; i < r; ++i) {
        Polynomial sum{0.0};
        for (int j = 0; j < i; ++j)
            if (A(i, j) != 0.0) sum += A(i, j) * (N[j] * span(j + 1, i - 1));
        N[i] = span(0, i - 1) + sum.times_z();
    }
    Polynomial sum{0.0};
    for (int j = 0; j < r; ++j)
        if (t.b()[j] != 0.0) sum += t.b()[j] * (N[j] * span(j + 1, r - 1));
    RationalStabilityFunction R;
    R.numerator = (span(0, r - 1) + sum.times_z()).trimmed();
    for (int i = 0; i < r; ++i)
        if (A(i, i) != 0.0) R.denominator_roots.push_back(A(i, i));
    return R;
}

namespace detail {

// e_k of the first m entries of v.
inline double elementary_symmetric(const std::vector<double>& v, int m, int k) {
    std::vector<double> e(k + 1, 0.0);
    e[0] = 1.0;
    for (int i = 0; i < m && i < static_cast<int>(v.size()); ++i)
        for (int j = k; j >= 1; --j) e[j] += v[i] * e[j - 1];
    return k >= 0 ? e[k] : 0.0;
}

}  // namespace detail

inline std::array<double, 3> sigma_hat_closed_form(const ImkgCoefficients& k) {
    k.validate();
    const int q = k.q;
    auto e = [&](int order, int m) { return m <= 0 ? (order == 0 ? 1.0 : 0.0) : detail::elementary_symmetric(k.delta_hat, m, order); };
    const double aq = k.ah(q), aq1 = k.ah(q - 1), aq2 = k.ah(q - 2);
    const double s1 = aq + k.bh(q - 1) - e(1, q - 1);
    const double s2 = e(2, q - 1) - k.bh(q - 1) * e(1, q - 1) + aq * (k.bh(q - 2) - e(1, q - 2)) + aq * aq1;
    const double s3 = -e(3, q - 1) + k.bh(q - 1) * e(2, q - 1) + aq * (e(2, q - 2) - k.bh(q - 2) * e(1, q - 2)) +
                      aq * aq1 * (k.bh(q - 3) - e(1, q - 3)) + aq * aq1 * aq2;
    return {s1, s2, s3};
}

inline double imaginary_axis_limit(const StabilityPolynomial& p, double tol = 1e-8) {
    const int d = p.degree();
    if (d < 1) return 0.0;
    const double slack = 1e-12;
    auto unstable = [&](double y) { return std::abs(p(std::complex<double>(0.0, y))) > 1.0 + slack; };
    const double h = 1e-4;
    const double y_end = std::max(d, 1) + 1.0;
    double lo = 0.0, hi = -1.0;
    for (double k = 1;; ++k) {
        const double y = k * h;
        if (y > y_end) break;
        if (unstable(y)) {
            hi = y;
            break;
        }
        lo = y;
    }
    if (hi < 0.0) return lo;
    if (lo == 0.0) return 0.0;
    while (hi - lo > tol * 0.5) {
        const double mid = 0.5 * (lo + hi);
        (unstable(mid) ? hi : lo) = mid;
    }
    if (std::abs(p[1] - 1.0) < 1e-12 && lo > d - 1 + tol)
        throw Error("imaginary axis limit exceeds degree - 1 for a consistent polynomial");
    return lo;
}

enum class KgClass { KGO, KGNO, other };

inline const char* to_string(KgClass k) {
    switch (k) {
        case KgClass::KGO: return "KGO";
        case KgClass::KGNO: return "KGNO";
        default: return "other";
    }
}

inline KgClass classify_kg(const StabilityPolynomial& p, double r0) {
    const int d = p.degree();
    if (d < 2 || r0 < 1e-6) return KgClass::other;
    if (std::abs(r0 - (d - 1)) <= 1e-6) return KgClass::KGO;
    const double s = (d - 1.0) * (d - 1.0) - 1.0;
    if (s > 0.0 && std::abs(r0 - std::sqrt(s)) <= 1e-6) return KgClass::KGNO;
    return KgClass::other;
}

inline KgClass classify_kg(const StabilityPolynomial& p) { return classify_kg(p, imaginary_axis_limit(p)); }

struct ImagAxisSample {
    double sup = 0.0;
    double argmax = 0.0;
    bool pole = false;
};

// 2048 log-spaced points per decade over [1e-4, 1e6].
inline ImagAxisSample sample_imaginary_axis(const RationalStabilityFunction& R) {
    ImagAxisSample s;
    const int per_decade = 2048, decades = 10;
    for (int k = 0; k <= per_decade * decades; ++k) {
        const double y = std::pow(10.0, -4.0 + static_cast<double>(k) / per_decade);
        const std::complex<double> z(0.0, y);
        std::complex<double> q = 1.0;
        for (double d : R.denominator_roots) q *= 1.0 - z * d;
        if (std::abs(q) == 0.0) {
            s.pole = true;
            s.sup = std::numeric_limits<double>::infinity();
            s.argmax = y;
            return s;
        }
        const double m = std::abs(R.numerator(z) / q);
        if (m > s.sup) {
            s.sup = m;
            s.argmax = y;
        }
    }
    return s;
}

struct StabilityReport {
    bool i_stable = false;
    bool a_stable = false;
    bool vi = false;
    bool l_stable = false;
    bool sd = false;
    double r0 = 0.0;
    KgClass kg_class = KgClass::other;

    // How I-stability was decided: "gamma-test" or "sampled" (the latter carries a caveat).
    std::string i_basis;
    bool gamma_applicable = false;
    std::array<double, 3> gamma{};
    double sampled_sup = 0.0;
    int phat_degree = 0;
    int implicit_stages = 0;
    double r_infinity = 0.0;
    std::string diagnostic;
};

inline std::array<double, 3> gamma_coefficients(const Polynomial& P, const std::vector<double>& d) {
    std::vector<double> d2;
    for (double v : d) d2.push_back(v * v);
    const int m = static_cast<int>(d2.size());
    const double s1 = P[1], s2 = P[2], s3 = P[3];
    return {s1 * s1 - 2.0 * s2 - detail::elementary_symmetric(d2, m, 1),
            s2 * s2 - 2.0 * s1 * s3 - detail::elementary_symmetric(d2, m, 2),
            s3 * s3 - detail::elementary_symmetric(d2, m, 3)};
}

inline StabilityReport stability_report(const DoubleTableau& t) {
    StabilityReport rep;
    const auto P = explicit_polynomial_general(t.explicit_part());
    rep.r0 = imaginary_axis_limit(P);
    rep.kg_class = classify_kg(P, rep.r0);
    rep.sd = t.is_sd();

    const auto R = implicit_stability_function(t.implicit_part());
    const auto& d = R.denominator_roots;
    rep.implicit_stages = static_cast<int>(d.size());
    rep.phat_degree = R.numerator_degree();
    rep.vi = rep.phat_degree < rep.implicit_stages;
    if (rep.vi) {
        rep.r_infinity = 0.0;
    } else if (rep.phat_degree == rep.implicit_stages) {
        double prod = 1.0;
        for (double v : d) prod *= -v;
        rep.r_infinity = std::abs(R.numerator[rep.phat_degree] / prod);
    } else {
        rep.r_infinity = std::numeric_limits<double>::infinity();
    }

    const double gtol = 1e-12;
    rep.gamma_applicable = rep.phat_degree <= 3;
    rep.gamma = gamma_coefficients(R.numerator, d);
    const bool gamma_ok = rep.gamma_applicable && rep.gamma[0] <= gtol && rep.gamma[1] <= gtol && rep.gamma[2] <= gtol;
    const auto s = sample_imaginary_axis(R);
    rep.sampled_sup = s.sup;
    if (gamma_ok) {
        rep.i_stable = true;
        rep.i_basis = "gamma-test";
    } else if (s.pole) {
        rep.i_stable = false;
        rep.i_basis = "sampled";
        rep.diagnostic = "pole of R-hat on the imaginary axis at y = " + std::to_string(s.argmax);
    } else {
        rep.i_stable = s.sup <= 1.0 + 1e-10;
        rep.i_basis = "sampled";
        if (!rep.i_stable)
            rep.diagnostic = "|R-hat(iy)| = " + std::to_string(s.sup) + " at y = " + std::to_string(s.argmax);
    }
    bool nonneg = true;
    for (double v : d) nonneg = nonneg && v >= 0.0;
    rep.a_stable = rep.i_stable && nonneg;
    rep.l_stable = rep.vi && rep.i_stable;
    return rep;
}

inline StabilityReport stability_report(const ImkgCoefficients& k) { return stability_report(expand_imkg(k, "")); }

}  // namespace imkg
