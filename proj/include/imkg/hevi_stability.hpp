#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "imkg/format.hpp"
#include "imkg/linear_stability.hpp"
#include "imkg/tableau.hpp"

namespace imkg {

using cplx = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;

class SingularMatrixError : public SolverError {
public:
    SingularMatrixError(double x, double z)
        : SolverError("singular stage matrix at x = " + fmt17(x) + ", z = " + fmt17(z)), x_(x), z_(z) {}
    double x() const { return x_; }
    double z() const { return z_; }

private:
    double x_, z_;
};

inline const Eigen::Matrix3d& hevi_N() {
    static const Eigen::Matrix3d N = (Eigen::Matrix3d() << 0, 0, 1, 0, 0, 0, 1, 0, 0).finished();
    return N;
}

inline const Eigen::Matrix3d& hevi_S() {
    static const Eigen::Matrix3d S = (Eigen::Matrix3d() << 0, 0, 0, 0, 0, 1, 0, 1, 0).finished();
    return S;
}

// Block forward substitution on the (lower triangular) 3r x 3r inner system.
inline Matrix3c hstability_matrix(const DoubleTableau& t, double x, double z) {
    const int r = t.stages();
    const Matrix& A = t.explicit_part().A();
    const Matrix& Ah = t.implicit_part().A();
    const cplx I(0.0, 1.0);
    const Matrix3c N = hevi_N().cast<cplx>(), S = hevi_S().cast<cplx>();
    std::vector<Matrix3c> Y(r);
    for (int i = 0; i < r; ++i) {
        Matrix3c rhs = Matrix3c::Identity();
        for (int j = 0; j < i; ++j) {
            if (A(i, j) == 0.0 && Ah(i, j) == 0.0) continue;
            rhs -= (I * x * A(i, j)) * (N * Y[j]) + (I * z * Ah(i, j)) * (S * Y[j]);
        }
        const Matrix3c D = Matrix3c::Identity() + (I * x * A(i, i)) * N + (I * z * Ah(i, i)) * S;
        const auto lu = D.fullPivLu();
        if (!lu.isInvertible() || std::abs(D.determinant()) < 1e-300) throw SingularMatrixError(x, z);
        Y[i] = lu.solve(rhs);
    }
    Matrix3c R = Matrix3c::Identity();
    for (int j = 0; j < r; ++j) {
        const double bj = t.explicit_part().b()[j], bhj = t.implicit_part().b()[j];
        if (bj == 0.0 && bhj == 0.0) continue;
        R -= I * ((x * bj) * (N * Y[j]) + (z * bhj) * (S * Y[j]));
    }
    return R;
}

namespace detail {

inline cplx det3(const Matrix3c& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

inline cplx principal_minors(const Matrix3c& m) {
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) -
           m(1, 2) * m(2, 1);
}

}  // namespace detail

// Roots of the characteristic cubic by Cardano, polished by Newton on det(M - λI).
inline std::array<cplx, 3> eigenvalues_3x3(const Matrix3c& M) {
    const cplx tr = M.trace();
    const cplx c1 = detail::principal_minors(M);
    const cplx c0 = detail::det3(M);
    // λ = μ + tr/3: μ³ + pμ + q = 0
    const cplx s = tr / 3.0;
    const cplx p = c1 - tr * tr / 3.0;
    const cplx q = -2.0 * s * s * s + c1 * s - c0;
    const cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    cplx w = -q / 2.0 + disc;
    if (std::abs(-q / 2.0 - disc) > std::abs(w)) w = -q / 2.0 - disc;
    std::array<cplx, 3> mu{};
    if (std::abs(w) == 0.0) {
        mu = {0.0, 0.0, 0.0};
    } else {
        const cplx u = std::pow(w, 1.0 / 3.0);
        const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
        cplx uk = u;
        for (int k = 0; k < 3; ++k) {
            mu[k] = uk - p / (3.0 * uk);
            uk *= omega;
        }
    }
    std::array<cplx, 3> lam{};
    for (int k = 0; k < 3; ++k) {
        cplx l = mu[k] + s;
        Matrix3c B = M - l * Matrix3c::Identity();
        double fl = std::abs(detail::det3(B));
        for (int it = 0; it < 4 && fl > 0.0; ++it) {
            const cplx df = -detail::principal_minors(B);
            if (std::abs(df) == 0.0) break;
            const cplx cand = l - detail::det3(B) / df;
            const Matrix3c Bc = M - cand * Matrix3c::Identity();
            const double fc = std::abs(detail::det3(Bc));
            if (!(fc < fl)) break;
            l = cand;
            B = Bc;
            fl = fc;
        }
        lam[k] = l;
    }
    return lam;
}

// Gelfand's formula by repeated squaring: ‖M^(2^m)‖^(2^-m).
inline double gelfand_radius(const Matrix3c& M, int squarings = 48) {
    Matrix3c B = M;
    double n = B.norm();
    if (n == 0.0) return 0.0;
    B /= n;
    double log_rho = std::log(n);
    double weight = 1.0;
    for (int m = 0; m < squarings; ++m) {
        B = (B * B).eval();
        n = B.norm();
        if (n == 0.0) return 0.0;
        B /= n;
        weight *= 0.5;
        log_rho += weight * std::log(n);
    }
    return std::exp(log_rho);
}

inline double spectral_radius(const Matrix3c& M) {
    const auto lam = eigenvalues_3x3(M);
    double rho = 0.0, sep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        rho = std::max(rho, std::abs(lam[i]));
        for (int j = i + 1; j < 3; ++j) sep = std::min(sep, std::abs(lam[i] - lam[j]));
    }
    if (!std::isfinite(rho) || sep < 1e-3 * std::max(1.0, rho)) return gelfand_radius(M);
    return rho;
}

struct HStabilityGrid {
    std::vector<double> x_grid;
    std::vector<double> z_grid;
    std::vector<double> rho;  // rho[ix * z_grid.size() + iz]

    double at(std::size_t ix, std::size_t iz) const { return rho[ix * z_grid.size() + iz]; }
};

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = (i == n - 1) ? b : a + (b - a) * i / (n - 1);
    return v;
}

inline double hstability_radius(const DoubleTableau& t, double x, double z) {
    if (x == 0.0 && z == 0.0) return 1.0;
    try {
        return spectral_radius(hstability_matrix(t, x, z));
    } catch (const SingularMatrixError&) {
        return std::numeric_limits<double>::infinity();
    }
}

inline HStabilityGrid scan_grid(const DoubleTableau& t, double x_max, double z_max, int nx, int nz,
                                const std::vector<double>& extra_z = {}, unsigned threads = 0) {
    if (nx < 1 || nz < 1 || x_max < 0.0 || z_max < 0.0) throw DomainError("scan_grid needs positive counts");
    HStabilityGrid g;
    g.x_grid = linspace(0.0, x_max, nx);
    g.z_grid = linspace(0.0, z_max, nz);
    g.z_grid.insert(g.z_grid.end(), extra_z.begin(), extra_z.end());
    std::sort(g.z_grid.begin(), g.z_grid.end());
    g.z_grid.erase(std::unique(g.z_grid.begin(), g.z_grid.end()), g.z_grid.end());
    const std::size_t NX = g.x_grid.size(), NZ = g.z_grid.size();
    g.rho.assign(NX * NZ, 0.0);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(NX));
    auto work = [&](unsigned id) {
        for (std::size_t ix = id; ix < NX; ix += threads)
            for (std::size_t iz = 0; iz < NZ; ++iz) g.rho[ix * NZ + iz] = hstability_radius(t, g.x_grid[ix], g.z_grid[iz]);
    };
    if (threads <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned id = 0; id < threads; ++id) pool.emplace_back(work, id);
        for (auto& th : pool) th.join();
    }
    return g;
}

struct ScanWindow {
    double x_max;
    double z_max = 50.0;
    int nx = 401;
    int nz = 501;
    std::vector<double> extra_z{100.0, 1e3, 1e6};
};

inline ScanWindow default_window(const DoubleTableau& t) {
    ScanWindow w;
    w.x_max = imaginary_axis_limit(explicit_polynomial_general(t.explicit_part())) + 0.5;
    return w;
}

inline HStabilityGrid scan_grid(const DoubleTableau& t, const ScanWindow& w, unsigned threads = 0) {
    return scan_grid(t, w.x_max, w.z_max, w.nx, w.nz, w.extra_z, threads);
}

inline void check_covers(const HStabilityGrid& g, double n0) {
    if (g.x_grid.empty() || g.x_grid.back() < n0) throw DomainError("grid does not cover x = " + fmt17(n0));
}

inline bool region_T_contained(const HStabilityGrid& g, double n0, double tol = 1e-8) {
    check_covers(g, n0);
    for (std::size_t ix = 0; ix < g.x_grid.size() && g.x_grid[ix] <= n0; ++ix)
        for (std::size_t iz = 0; iz < g.z_grid.size(); ++iz)
            if (!(g.at(ix, iz) <= 1.0 + tol)) return false;
    return true;
}

struct RegionQueryResult {
    double n0 = 0.0;
    bool t_contained = false;
    std::optional<double> gamma_min;
    double tolerance = 1e-8;
};

// Smallest cone slope γ such that every unstable sample with x <= n0 lies below z = γx.
inline std::optional<double> min_gamma(const HStabilityGrid& g, double n0, double tol = 1e-8) {
    check_covers(g, n0);
    const std::size_t NZ = g.z_grid.size();
    double gamma = 0.0;
    for (std::size_t ix = 0; ix < g.x_grid.size() && g.x_grid[ix] <= n0; ++ix) {
        if (!(g.at(ix, 0) <= 1.0 + tol) && g.z_grid[0] == 0.0)
            throw DomainError("explicit axis unstable before n0 at x = " + fmt17(g.x_grid[ix]));
        const double x = g.x_grid[ix];
        if (x <= 0.0) continue;
        if (!(g.at(ix, NZ - 1) <= 1.0 + tol)) return std::nullopt;
        for (std::size_t iz = NZ; iz-- > 0;) {
            if (!(g.at(ix, iz) <= 1.0 + tol)) {
                gamma = std::max(gamma, g.z_grid[iz] / x);
                break;
            }
        }
    }
    return gamma;
}

inline RegionQueryResult region_query(const HStabilityGrid& g, double n0, double tol = 1e-8) {
    RegionQueryResult res;
    res.n0 = n0;
    res.tolerance = tol;
    res.t_contained = region_T_contained(g, n0, tol);
    res.gamma_min = min_gamma(g, n0, tol);
    return res;
}

// Largest sampled x such that every column up to and including it is stable for all sampled z.
inline double stable_column_width(const HStabilityGrid& g, double tol = 1e-8) {
    double width = 0.0;
    for (std::size_t ix = 0; ix < g.x_grid.size(); ++ix) {
        for (std::size_t iz = 0; iz < g.z_grid.size(); ++iz)
            if (!(g.at(ix, iz) <= 1.0 + tol)) return width;
        width = g.x_grid[ix];
    }
    return width;
}

inline void write_grid_csv(const HStabilityGrid& g, std::ostream& os) {
    os << "x,z,rho\n";
    for (std::size_t ix = 0; ix < g.x_grid.size(); ++ix)
        for (std::size_t iz = 0; iz < g.z_grid.size(); ++iz)
            os << fmt17(g.x_grid[ix]) << ',' << fmt17(g.z_grid[iz]) << ',' << fmt17(g.at(ix, iz)) << '\n';
}

}  // namespace imkg
