#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace imkg {

// Real polynomial, ascending coefficients: c[0] + c[1] z + ...
class Polynomial {
public:
    Polynomial() : c_{0.0} {}
    Polynomial(std::initializer_list<double> c) : c_(c) {
        if (c_.empty()) c_.push_back(0.0);
    }
    explicit Polynomial(std::vector<double> c) : c_(std::move(c)) {
        if (c_.empty()) c_.push_back(0.0);
    }

    static Polynomial constant(double a) { return Polynomial{a}; }
    // 1 - d z
    static Polynomial one_minus(double d) { return Polynomial{1.0, -d}; }

    const std::vector<double>& coefficients() const { return c_; }
    std::size_t size() const { return c_.size(); }
    double operator[](std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }

    // Index of the last coefficient with |c_k| > tol, 0 for the zero polynomial.
    int degree(double tol = 0.0) const {
        for (std::size_t k = c_.size(); k-- > 1;)
            if (std::abs(c_[k]) > tol) return static_cast<int>(k);
        return 0;
    }

    Polynomial trimmed(double tol = 0.0) const {
        return Polynomial(std::vector<double>(c_.begin(), c_.begin() + degree(tol) + 1));
    }

    template <class T>
    T operator()(T z) const {
        T acc = T(c_.back());
        for (std::size_t k = c_.size() - 1; k-- > 0;) acc = acc * z + T(c_[k]);
        return acc;
    }

    Polynomial times_z() const {
        std::vector<double> out(c_.size() + 1, 0.0);
        std::copy(c_.begin(), c_.end(), out.begin() + 1);
        return Polynomial(std::move(out));
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Polynomial& operator*=(double s) {
        for (auto& v : c_) v *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        std::vector<double> out(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(out));
    }

private:
    std::vector<double> c_;
};

}  // namespace imkg
