#pragma once

#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "imkg/linear_stability.hpp"
#include "imkg/method_construction.hpp"
#include "imkg/order_conditions.hpp"
#include "imkg/tableau.hpp"

namespace imkg {

// Published coefficients as listed; lengths need not match q.
struct RawCoefficientRecord {
    std::string name;
    int p = 0;
    int f = 0;
    int j = 0;
    std::vector<double> alpha;
    std::vector<double> alpha_hat;
    std::vector<double> delta_hat;
    std::vector<double> beta;  // IMKG3 only
};

struct NormalizationResult {
    ImkgCoefficients coefficients;
    bool as_printed_inconsistent = false;
    std::vector<std::string> violations;
    std::vector<std::string> applied;  // normalization steps that changed something
};

struct RegistryEntry {
    RawCoefficientRecord raw;
    NormalizationResult normalized;

    const std::string& name() const { return raw.name; }
    DoubleTableau tableau() const { return expand_imkg(normalized.coefficients, raw.name); }
};

inline void parse_imkg_name(const std::string& name, int& p, int& f, int& j) {
    if (name.size() != 8 || name.compare(0, 4, "IMKG") != 0 || !std::isdigit(static_cast<unsigned char>(name[4])) ||
        !std::isdigit(static_cast<unsigned char>(name[5])) || !std::isdigit(static_cast<unsigned char>(name[6])) ||
        !std::islower(static_cast<unsigned char>(name[7])))
        throw ConstructionError("not an IMKG{p}{f}{j}{letter} name: " + name);
    p = name[4] - '0';
    f = name[5] - '0';
    j = name[6] - '0';
    if (p < 2 || p > 3 || f < 2 || j < 1 || j >= f + 1) throw ConstructionError("name digits out of range: " + name);
}

namespace detail {

inline std::vector<double> fit_left(std::vector<double> v, std::size_t len, const std::string& what,
                                    const std::string& name) {
    while (v.size() > len) {
        if (v.front() != 0.0) throw ConstructionError(name + ": " + what + " too long and leading entry is nonzero");
        v.erase(v.begin());
    }
    v.insert(v.begin(), len - v.size(), 0.0);
    return v;
}

inline PolynomialTarget family_target(int p, int q) {
    if (p == 2 && q == 3) return kgo3();
    if (q == 4) return kgno4();
    if (p == 2 && q == 5) return kgo5();
    if (p == 3 && q == 5) return kgno5();
    throw NotFoundError("no target polynomial for order " + std::to_string(p) + ", q = " + std::to_string(q));
}

}  // namespace detail

inline NormalizationResult normalize_raw(const RawCoefficientRecord& rec) {
    int p = 0, f = 0, j = 0;
    parse_imkg_name(rec.name, p, f, j);
    if (p != rec.p || f != rec.f || j != rec.j) throw ConstructionError(rec.name + ": digits disagree with record fields");
    const int q = f;
    const auto n = static_cast<std::size_t>(q);
    NormalizationResult out;
    ImkgCoefficients& k = out.coefficients;
    k.q = q;

    // R1
    if (p == 2) {
        for (double v : rec.beta)
            if (v != 0.0) throw ConstructionError(rec.name + ": nonzero beta printed for an IMKG2 method");
        k.beta.assign(n - 1, 0.0);
    } else {
        if (rec.beta.size() != n - 1) throw ConstructionError(rec.name + ": beta must have length q-1");
        k.beta = rec.beta;
    }
    k.beta_hat = k.beta;

    // R2
    k.alpha_hat = rec.alpha_hat;
    if (p == 2 && (k.alpha_hat.empty() || k.alpha_hat.back() != 1.0)) {
        k.alpha_hat.push_back(1.0);
        out.applied.push_back("R2: appended alphahat_q = 1");
    }
    if (k.alpha_hat.size() != n) out.applied.push_back("R2: aligned alphahat to length q");
    k.alpha_hat = detail::fit_left(k.alpha_hat, n, "alphahat", rec.name);

    // R3
    if (rec.delta_hat.size() != n - 1) out.applied.push_back("R3: aligned dhat to length q-1");
    k.delta_hat = detail::fit_left(rec.delta_hat, n - 1, "dhat", rec.name);

    // R4
    if (rec.alpha.size() == n) {
        k.alpha = rec.alpha;
    } else if (rec.alpha.size() == n - 1) {
        const auto target = detail::family_target(p, q);
        k.alpha.assign(n, 0.0);
        std::copy(rec.alpha.begin(), rec.alpha.end(), k.alpha.begin() + 1);
        double prod = 1.0;
        for (int m = 2; m <= q; ++m) prod *= k.a(m);
        if (prod == 0.0) throw ConstructionError(rec.name + ": cannot recover alpha_1 (zero product)");
        k.alpha[0] = target.sigma[q - 1] / prod;
        out.applied.push_back("R4: recovered alpha_1 from the target polynomial");
    } else {
        throw ConstructionError(rec.name + ": alpha has length " + std::to_string(rec.alpha.size()) +
                                ", expected q or q-1");
    }

    // R5
    const auto rep = check_order_general(expand_imkg(k, rec.name), p);
    for (auto& id : rep.violated()) out.violations.push_back(id);
    int nnz = 0;
    for (double v : k.delta_hat) nnz += v != 0.0;
    if (nnz != j)
        out.violations.push_back("implicit stage count " + std::to_string(nnz) + " != " + std::to_string(j));
    out.as_printed_inconsistent = !out.violations.empty();
    return out;
}

inline RawCoefficientRecord make_raw(std::string name, std::vector<double> alpha, std::vector<double> alpha_hat,
                                     std::vector<double> delta_hat, std::vector<double> beta = {}) {
    RawCoefficientRecord r;
    parse_imkg_name(name, r.p, r.f, r.j);
    r.name = std::move(name);
    r.alpha = std::move(alpha);
    r.alpha_hat = std::move(alpha_hat);
    r.delta_hat = std::move(delta_hat);
    r.beta = std::move(beta);
    return r;
}

inline std::vector<RawCoefficientRecord> published_records() {
    const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
    const double g_minus = 0.08931639747704086, g_plus = 1.2440169358562922;
    const std::vector<double> a3{0.5, 0.5, 1.0};
    const std::vector<double> a4{0.25, 1.0 / 3.0, 0.5, 1.0};
    const std::vector<double> a5{0.25, 1.0 / 6.0, 3.0 / 8.0, 0.5, 1.0};
    const double da = (2.0 - s2) / 2.0, db = (2.0 + s2) / 2.0;
    const double dp = 0.5 + s3 / 6.0, dm = 0.5 - s3 / 6.0;
    return {
        make_raw("IMKG232a", a3, {0, 0, (s2 - 1) / 2}, {da, da}),
        make_raw("IMKG232b", a3, {0, 0, -(1 + s2) / 2}, {0, db, db}),
        make_raw("IMKG242a", a4, {0, 0, (s2 - 1) / 2, 1}, {0, 0, da, da}),
        make_raw("IMKG242b", a4, {0, 0, -(1 + s2) / 2, 1}, {0, 0, db, db}),
        make_raw("IMKG243a", a4, {0, 1.0 / 6.0, s3 / 6, 1}, {0, dp, dp, dp}),
        // last dhat printed as 2√2/2
        make_raw("IMKG252a", a5, {0, 0, (s2 - 1) / 2, 1}, {0, 0, 0, da, 2 * s2 / 2}),
        make_raw("IMKG252b", a5, {0, 0, -(1 + s2) / 2, 1}, {0, 0, 0, db, db}),
        make_raw("IMKG253a", a5, {0, g_minus, s3 / 6, 1}, {0, dm, dm, dm}),
        make_raw("IMKG253b", a5, {0, g_plus, -s3 / 6, 1}, {0, dp, dp, dp}),
        make_raw("IMKG254a", a5, {0, -3.0 / 10.0, 5.0 / 6.0, -1.5}, {-0.5, 1, 1, 2}),
        make_raw("IMKG254b", a5, {0, -1.0 / 20.0, 5.0 / 4.0, -0.5}, {-0.5, 1, 1, 1}),
        make_raw("IMKG254c", a5, {0, 1.0 / 20.0, 5.0 / 36.0, 1.0 / 3.0, 1}, {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}),
        make_raw("IMKG342a", {1.0 / 3.0, 1.0 / 3.0, 0.75}, {0, -(1 + s3) / 6, -(1 + s3) / 6, 0.75},
                 {0, (1 + s3 / 3) / 2, (1 + s3 / 3) / 2}, {1.0 / 3.0, 1.0 / 3.0, 0.25}),
        make_raw("IMKG343a", {0.25, 2.0 / 3.0, 1.0 / 3.0, 0.75}, {0, -1.0 / 3.0, -2.0 / 3.0, 0.75},
                 {-1.0 / 3.0, 1, 1}, {0, 1.0 / 3.0, 0.25}),
        make_raw("IMKG353a", {0.25, 2.0 / 3.0, 1.0 / 3.0, 0.75}, {0, -359.0 / 600.0, -559.0 / 600.0, 0.75},
                 {-1.1678009811335388, 1.265, 1.265}, {0, 0, 1.0 / 3.0, 0.25}),
        make_raw("IMKG354a", {0.2, 0.2, 2.0 / 3.0, 1.0 / 3.0, 0.75}, {0, 0, 11.0 / 30.0, -2.0 / 3.0, 0.75},
                 {0, 0.4, 0.4, 1}, {0, 0, 1.0 / 3.0, 0.25}),
    };
}

inline const std::vector<RegistryEntry>& registry() {
    static const std::vector<RegistryEntry> entries = [] {
        std::vector<RegistryEntry> out;
        for (auto& rec : published_records()) out.push_back({rec, normalize_raw(rec)});
        return out;
    }();
    return entries;
}

inline const RegistryEntry& lookup(const std::string& name) {
    for (const auto& e : registry())
        if (e.raw.name == name) return e;
    throw NotFoundError("unknown method: " + name);
}

}  // namespace imkg
