#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "imkg/tableau.hpp"

namespace imkg {

struct Residual {
    std::string id;
    int order;
    double value;
};

struct OrderReport {
    int order_classified = 0;
    std::vector<Residual> residuals;
    double tolerance = 1e-10;

    bool passes(int p) const {
        for (const auto& r : residuals)
            if (r.order <= p && !(std::abs(r.value) <= tolerance)) return false;
        return true;
    }

    std::vector<std::string> violated() const {
        std::vector<std::string> out;
        for (const auto& r : residuals)
            if (!(std::abs(r.value) <= tolerance)) out.push_back(r.id);
        return out;
    }

    double max_abs(int p = 3) const {
        double m = 0.0;
        for (const auto& r : residuals)
            if (r.order <= p) m = std::max(m, std::abs(r.value));
        return m;
    }

    const Residual* find(const std::string& id) const {
        for (const auto& r : residuals)
            if (r.id == id) return &r;
        return nullptr;
    }
};

namespace detail {

inline void classify(OrderReport& rep) {
    int maxp = 0;
    for (const auto& r : rep.residuals) maxp = std::max(maxp, r.order);
    rep.order_classified = 0;
    for (int p = 1; p <= maxp; ++p) {
        if (!rep.passes(p)) break;
        rep.order_classified = p;
    }
}

inline void general_conditions(const DoubleTableau& t, int max_order, OrderReport& rep) {
    const auto& ex = t.explicit_part();
    const auto& im = t.implicit_part();
    const Vector one = Vector::Ones(t.stages());
    struct Part {
        const char* tag;
        const Vector* b;
        const Matrix* A;
        const Vector* c;
    };
    const Part parts[2] = {{"", &ex.b(), &ex.A(), &ex.c()}, {"hat", &im.b(), &im.A(), &im.c()}};
    auto name = [](const char* base, const char* tag) { return std::string(base) + tag; };

    for (const auto& w : parts) rep.residuals.push_back({name("b", w.tag) + ".1", 1, w.b->dot(one) - 1.0});
    if (max_order < 2) return;
    for (const auto& w : parts)
        for (const auto& c : parts)
            rep.residuals.push_back({name("b", w.tag) + "." + name("c", c.tag), 2, w.b->dot(*c.c) - 0.5});
    if (max_order < 3) return;
    for (const auto& w : parts)
        for (const auto& m : parts)
            for (const auto& c : parts)
                rep.residuals.push_back({name("b", w.tag) + "." + name("A", m.tag) + "." + name("c", c.tag), 3,
                                         w.b->dot(*m.A * *c.c) - 1.0 / 6.0});
    for (const auto& w : parts)
        for (const auto& m : parts)
            for (const auto& c : parts)
                rep.residuals.push_back({name("b", w.tag) + "." + name("C", m.tag) + "." + name("c", c.tag), 3,
                                         w.b->dot(m.c->cwiseProduct(*c.c)) - 1.0 / 3.0});
}

}  // namespace detail

inline OrderReport check_order2_general(const DoubleTableau& t, double tol = 1e-10) {
    OrderReport rep;
    rep.tolerance = tol;
    detail::general_conditions(t, 2, rep);
    detail::classify(rep);
    return rep;
}

inline OrderReport check_order3_general(const DoubleTableau& t, double tol = 1e-10) {
    OrderReport rep;
    rep.tolerance = tol;
    detail::general_conditions(t, 3, rep);
    detail::classify(rep);
    return rep;
}

inline OrderReport check_order_general(const DoubleTableau& t, int p, double tol = 1e-10) {
    return p >= 3 ? check_order3_general(t, tol) : check_order2_general(t, tol);
}

inline int classify_order(const DoubleTableau& t, double tol = 1e-10) {
    return check_order3_general(t, tol).order_classified;
}

// Simplified conditions for the IMKG layout. The order-3 set includes the
// order-1/2 ones so that order_classified stays meaningful.
inline OrderReport check_theorem31(const ImkgCoefficients& k, int target_order, double tol = 1e-10) {
    if (target_order != 2 && target_order != 3) throw DomainError("target_order must be 2 or 3");
    k.validate();
    const int q = k.q;
    OrderReport rep;
    rep.tolerance = tol;
    auto add = [&](std::string id, int ord, double v) { rep.residuals.push_back({std::move(id), ord, v}); };

    const double ex_inner = k.a(q - 1) + k.b(q - 2);
    const double im_inner = k.ah(q - 1) + k.d(q - 1) + k.bh(q - 2);
    add("alpha_q+beta_{q-1}", 1, k.a(q) + k.b(q - 1) - 1.0);
    add("alphahat_q+betahat_{q-1}", 1, k.ah(q) + k.bh(q - 1) - 1.0);
    add("alpha_q*(alpha_{q-1}+beta_{q-2})", 2, k.a(q) * ex_inner - 0.5);
    add("alpha_q*(alphahat_{q-1}+dhat_{q-1}+betahat_{q-2})", 2, k.a(q) * im_inner - 0.5);
    add("alphahat_q*(alpha_{q-1}+beta_{q-2})", 2, k.ah(q) * ex_inner - 0.5);
    add("alphahat_q*(alphahat_{q-1}+dhat_{q-1}+betahat_{q-2})", 2, k.ah(q) * im_inner - 0.5);

    if (target_order == 3) {
        add("alpha_q", 3, k.a(q) - 0.75);
        add("alphahat_q", 3, k.ah(q) - 0.75);
        add("beta_{q-1}", 3, k.b(q - 1) - 0.25);
        add("betahat_{q-1}", 3, k.bh(q - 1) - 0.25);
        add("alpha_{q-1}+beta_{q-2}", 3, ex_inner - 2.0 / 3.0);
        add("alphahat_{q-1}+dhat_{q-1}+betahat_{q-2}", 3, im_inner - 2.0 / 3.0);
        const double inner[2] = {k.a(q - 2) + k.b(q - 3), k.ah(q - 2) + k.d(q - 2) + k.bh(q - 3)};
        const char* inner_id[2] = {"(alpha_{q-2}+beta_{q-3})", "(alphahat_{q-2}+dhat_{q-2}+betahat_{q-3})"};
        const double lead[2] = {k.a(q - 1), k.ah(q - 1)};
        const double dlead[2] = {0.0, k.d(q - 1)};
        const char* lead_id[2] = {"alpha_{q-1}*", "alphahat_{q-1}*"};
        const char* d_id[2] = {"", "+2dhat_{q-1}/3"};
        for (int l = 0; l < 2; ++l)
            for (int i = 0; i < 2; ++i)
                add(std::string(lead_id[l]) + inner_id[i] + d_id[l], 3,
                    lead[l] * inner[i] + 2.0 * dlead[l] / 3.0 - 2.0 / 9.0);
    }
    detail::classify(rep);
    return rep;
}

}  // namespace imkg
