#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "imkg/errors.hpp"

namespace imkg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kRowSumTol = 1e-14;

class ButcherTableau {
public:
    ButcherTableau() = default;

    ButcherTableau(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
        check_shape();
        c_ = A_.rowwise().sum();
    }

    // c is checked against the row sums of A.
    ButcherTableau(Matrix A, Vector b, const Vector& c) : ButcherTableau(std::move(A), std::move(b)) {
        if (c.size() != c_.size()) throw ConstructionError("c has wrong length");
        for (Eigen::Index i = 0; i < c.size(); ++i)
            if (std::abs(c[i] - c_[i]) > kRowSumTol)
                throw ConstructionError("c[" + std::to_string(i) + "] differs from row sum of A");
    }

    int stages() const { return static_cast<int>(A_.rows()); }
    const Matrix& A() const { return A_; }
    const Vector& b() const { return b_; }
    const Vector& c() const { return c_; }

    bool is_strictly_lower() const {
        for (Eigen::Index i = 0; i < A_.rows(); ++i)
            for (Eigen::Index j = i; j < A_.cols(); ++j)
                if (A_(i, j) != 0.0) return false;
        return true;
    }
    bool is_lower() const {
        for (Eigen::Index i = 0; i < A_.rows(); ++i)
            for (Eigen::Index j = i + 1; j < A_.cols(); ++j)
                if (A_(i, j) != 0.0) return false;
        return true;
    }

    friend bool operator==(const ButcherTableau& x, const ButcherTableau& y) {
        return x.A_ == y.A_ && x.b_ == y.b_;
    }

private:
    void check_shape() const {
        if (A_.rows() < 1 || A_.rows() != A_.cols()) throw ConstructionError("A must be square with r >= 1");
        if (b_.size() != A_.rows()) throw ConstructionError("b has wrong length");
    }

    Matrix A_;
    Vector b_;
    Vector c_;
};

class DoubleTableau {
public:
    DoubleTableau() = default;

    DoubleTableau(std::string name, ButcherTableau explicit_part, ButcherTableau implicit_part)
        : name_(std::move(name)), ex_(std::move(explicit_part)), im_(std::move(implicit_part)) {
        if (ex_.stages() != im_.stages())
            throw ConstructionError("explicit and implicit parts have different stage counts");
        if (!ex_.is_strictly_lower()) throw ConstructionError("explicit part not strictly lower triangular");
        if (!im_.is_lower()) throw ConstructionError("implicit part not lower triangular");
    }

    const std::string& name() const { return name_; }
    const ButcherTableau& explicit_part() const { return ex_; }
    const ButcherTableau& implicit_part() const { return im_; }
    int stages() const { return ex_.stages(); }

    bool is_fsal() const {
        const int r = stages();
        for (int j = 0; j < r; ++j) {
            if (ex_.b()[j] != ex_.A()(r - 1, j)) return false;
            if (im_.b()[j] != im_.A()(r - 1, j)) return false;
        }
        return true;
    }

    std::vector<double> implicit_diagonal() const {
        std::vector<double> d;
        for (int i = 0; i < stages(); ++i)
            if (im_.A()(i, i) != 0.0) d.push_back(im_.A()(i, i));
        return d;
    }

    int implicit_stage_count() const { return static_cast<int>(implicit_diagonal().size()); }

    bool is_sd() const {
        auto d = implicit_diagonal();
        for (double v : d)
            if (std::abs(v - d.front()) > 1e-14 * std::max(1.0, std::abs(v))) return false;
        return true;
    }

    friend bool operator==(const DoubleTableau& x, const DoubleTableau& y) {
        return x.name_ == y.name_ && x.ex_ == y.ex_ && x.im_ == y.im_;
    }

private:
    std::string name_;
    ButcherTableau ex_;
    ButcherTableau im_;
};

// alpha, alpha_hat have length q; beta, beta_hat, delta_hat have length q-1.
struct ImkgCoefficients {
    int q = 0;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> alpha_hat;
    std::vector<double> beta_hat;
    std::vector<double> delta_hat;

    void validate() const {
        if (q < 2) throw ConstructionError("q must be at least 2");
        const auto n = static_cast<std::size_t>(q);
        auto need = [](const std::vector<double>& v, std::size_t len, const char* what) {
            if (v.size() != len)
                throw ConstructionError(std::string(what) + " must have length " + std::to_string(len) +
                                        ", got " + std::to_string(v.size()));
        };
        need(alpha, n, "alpha");
        need(alpha_hat, n, "alpha_hat");
        need(beta, n - 1, "beta");
        need(beta_hat, n - 1, "beta_hat");
        need(delta_hat, n - 1, "delta_hat");
    }

    // 1-based accessors; indices outside the stored range read as 0.
    double a(int j) const { return at(alpha, j); }
    double ah(int j) const { return at(alpha_hat, j); }
    double b(int j) const { return at(beta, j); }
    double bh(int j) const { return at(beta_hat, j); }
    double d(int j) const { return at(delta_hat, j); }

    friend bool operator==(const ImkgCoefficients&, const ImkgCoefficients&) = default;

private:
    static double at(const std::vector<double>& v, int j) {
        return (j >= 1 && j <= static_cast<int>(v.size())) ? v[j - 1] : 0.0;
    }
};

inline DoubleTableau expand_imkg(const ImkgCoefficients& k, std::string name) {
    k.validate();
    const int q = k.q, r = q + 1;
    Matrix A = Matrix::Zero(r, r), Ah = Matrix::Zero(r, r);
    for (int j = 1; j <= q; ++j) {
        A(j, j - 1) += k.a(j);
        A(j, 0) += k.b(j - 1);
        Ah(j, j - 1) += k.ah(j);
        Ah(j, 0) += k.bh(j - 1);
        if (j < q) Ah(j, j) = k.d(j);
    }
    Vector b = A.row(q).transpose();
    Vector bh = Ah.row(q).transpose();
    return DoubleTableau(std::move(name), ButcherTableau(std::move(A), std::move(b)),
                         ButcherTableau(std::move(Ah), std::move(bh)));
}

}  // namespace imkg
