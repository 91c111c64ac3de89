#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "imkg/linear_stability.hpp"
#include "imkg/tableau.hpp"

namespace imkg {

enum class TargetFamily { KGO, KGNO, custom };

struct PolynomialTarget {
    TargetFamily family = TargetFamily::custom;
    int q = 0;
    std::vector<double> sigma;  // σ_1..σ_q

    StabilityPolynomial polynomial() const {
        std::vector<double> c{1.0};
        c.insert(c.end(), sigma.begin(), sigma.end());
        return Polynomial(std::move(c));
    }
};

inline PolynomialTarget kgo3() { return {TargetFamily::KGO, 3, {1.0, 0.5, 0.25}}; }
inline PolynomialTarget kgno4() { return {TargetFamily::KGNO, 4, {1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0}}; }
inline PolynomialTarget kgo5() { return {TargetFamily::KGO, 5, {1.0, 0.5, 3.0 / 16.0, 1.0 / 32.0, 1.0 / 128.0}}; }
inline PolynomialTarget kgno5() { return {TargetFamily::KGNO, 5, {1.0, 0.5, 1.0 / 6.0, 1.0 / 30.0, 1.0 / 150.0}}; }

inline PolynomialTarget builtin_target(TargetFamily family, int q) {
    if (family == TargetFamily::KGO && q == 3) return kgo3();
    if (family == TargetFamily::KGNO && q == 4) return kgno4();
    if (family == TargetFamily::KGO && q == 5) return kgo5();
    if (family == TargetFamily::KGNO && q == 5) return kgno5();
    throw NotFoundError("no built-in target polynomial for q = " + std::to_string(q));
}

// β = 0 chain: α_q = σ_1, α_{q-k+1} = σ_k / Π_{j<=k-2} α_{q-j}.
inline std::vector<double> alpha_from_polynomial(const PolynomialTarget& t) {
    const int q = static_cast<int>(t.sigma.size());
    if (q < 1) throw DomainError("empty target polynomial");
    std::vector<double> alpha(q, 0.0);
    double prod = 1.0;
    for (int k = 1; k <= q; ++k) {
        if (prod == 0.0) throw DomainError("target incompatible with nonzero alpha chain");
        const double a = t.sigma[k - 1] / prod;
        if (a == 0.0) throw DomainError("target incompatible with nonzero alpha chain");
        alpha[q - k] = a;
        prod *= a;
    }
    return alpha;
}

struct Imkg2FreeParameters {
    std::vector<double> alpha_hat_lead;  // α̂_1..α̂_{q-2}
    std::vector<double> delta_hat;       // d̂_1..d̂_{q-1}
};

// Second-order IMKG family with β = β̂ = 0.
inline ImkgCoefficients derive_imkg2(int q, const PolynomialTarget& target, const Imkg2FreeParameters& free) {
    if (q < 2) throw DomainError("q must be at least 2");
    if (static_cast<int>(target.sigma.size()) != q) throw DomainError("target degree differs from q");
    if (static_cast<int>(free.delta_hat.size()) != q - 1) throw DomainError("delta_hat must have length q-1");
    if (static_cast<int>(free.alpha_hat_lead.size()) != q - 2) throw DomainError("alpha_hat_lead must have length q-2");
    ImkgCoefficients k;
    k.q = q;
    k.alpha = alpha_from_polynomial(target);
    k.beta.assign(q - 1, 0.0);
    k.beta_hat.assign(q - 1, 0.0);
    k.delta_hat = free.delta_hat;
    k.alpha_hat = free.alpha_hat_lead;
    k.alpha_hat.push_back(0.5 - k.d(q - 1));
    k.alpha_hat.push_back(1.0);
    return k;
}

inline int phat_degree(const ImkgCoefficients& k) {
    return implicit_stability_function(expand_imkg(k, "").implicit_part()).numerator_degree();
}

// Third-order q = 4 construction with deg P̂ = 2 and the q = 4 KGNO explicit polynomial.
inline ImkgCoefficients derive_imkg3_q4(double d2, double d3, double alpha2, double beta1) {
    auto div = [](double num, double den, const char* what) {
        if (den == 0.0 || !std::isfinite(num / den))
            throw DomainError(std::string("division by zero in ") + what);
        return num / den;
    };
    const double s = alpha2 + beta1;
    const double a4 = 0.75, b3 = 0.25;
    const double a3 = div(2.0, 9.0 * s, "alpha_3 = 2/(9(alpha_2+beta_1))");
    const double b2 = 2.0 / 3.0 - a3;
    const double ah4 = 0.75, bh3 = 0.25, bh1 = beta1;
    const double ah3 = div(2.0 / 9.0 - 2.0 * d3 / 3.0, s, "alphahat_3 = (2/9 - 2 dhat_3/3)/(alpha_2+beta_1)");
    const double bh2 = 2.0 / 3.0 - d3 - ah3;
    const double ah2 = div(2.0 / 9.0 - 2.0 * d3 / 3.0, ah3, "alphahat_2 from the 2/9 condition") - d2 - bh1;
    // σ̂_3 = 0
    const double d1 = div(-bh3 * d2 * d3 + ah4 * bh2 * d2 - ah4 * ah3 * bh1 - ah4 * ah3 * ah2,
                          ah4 * d2 + bh3 * d2 + bh3 * d3 - d2 * d3 - ah3 * ah4 - ah4 * bh2, "dhat_1 (sigmahat_3 = 0)");
    // σ̂_4 = 0
    const double ah1 = div(ah3 * ah4 * bh1 * d1 - ah4 * bh2 * d1 * d2 + bh3 * d1 * d2 * d3, ah2 * ah3 * ah4,
                           "alphahat_1 (sigmahat_4 = 0)");
    const double a1 = div(kgno4().sigma[3], a4 * a3 * alpha2, "alpha_1 from the KGNO sigma_4");

    ImkgCoefficients k;
    k.q = 4;
    k.alpha = {a1, alpha2, a3, a4};
    k.beta = {beta1, b2, b3};
    k.alpha_hat = {ah1, ah2, ah3, ah4};
    k.beta_hat = {bh1, bh2, bh3};
    k.delta_hat = {d1, d2, d3};
    return k;
}

}  // namespace imkg
