#pragma once

#include "modp/core.hpp"

#include <algorithm>
#include <complex>
#include <utility>

namespace modp {

/// Real analogue of the DFT matrix. Rows are u, v_1, w_1, v_2, w_2, ...
/// M is the cyclic shift (x_1,...,x_p) -> (x_p, x_1, ..., x_{p-1}) and
/// D = diag(1, R(theta), R(2 theta), ...) satisfies M = F^T D F.
struct RealDFT {
    int p = 2;
    Mat F, D, M;

    Mat F_perp() const { return F.bottomRows(p - 1); }
    Mat D_perp() const { return D.bottomRightCorner(p - 1, p - 1); }
};

inline Mat kron_identity(const Mat& A, int m) {
    Mat K = Mat::Zero(A.rows() * m, A.cols() * m);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * m, j * m, m, m) = A(i, j) * Mat::Identity(m, m);
    return K;
}

inline Mat cyclic_shift(int p) {
    Mat M = Mat::Zero(p, p);
    for (int i = 0; i < p; ++i) M(i, (i + p - 1) % p) = 1;
    return M;
}

inline Mat rotation2(double a) {
    Mat R(2, 2);
    R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return R;
}

inline RealDFT build_dft(int p) {
    require_prime(p);
    RealDFT r;
    r.p = p;
    r.M = cyclic_shift(p);
    r.F = Mat::Zero(p, p);
    r.D = Mat::Zero(p, p);
    r.D(0, 0) = 1;
    if (p == 2) {
        double s = 1 / std::sqrt(2.0);
        r.F << s, s, s, -s;
        r.D(1, 1) = -1;
        return r;
    }
    const double th = 2 * M_PI / p;
    r.F.row(0).setConstant(std::sqrt(1.0 / p));
    for (int j = 1; j <= (p - 1) / 2; ++j) {
        for (int c = 0; c < p; ++c) {
            r.F(2 * j - 1, c) = std::sqrt(2.0 / p) * std::cos(c * j * th);
            r.F(2 * j, c) = std::sqrt(2.0 / p) * std::sin(c * j * th);
        }
        r.D.block(2 * j - 1, 2 * j - 1, 2, 2) = rotation2(j * th);
    }
    return r;
}

struct FourierResiduals {
    double orthogonality = 0;    // ||F F^T - I||_inf
    double diagonalization = 0;  // ||M - F^T D F||_inf
    double kernel = 0;           // ||F_perp (x,...,x)|| for a fixed test vector
};

inline FourierResiduals fourier_residuals(int p, int n = 0) {
    RealDFT d = build_dft(p);
    FourierResiduals r;
    r.orthogonality = (d.F * d.F.transpose() - Mat::Identity(p, p)).cwiseAbs().maxCoeff();
    r.diagonalization = (d.M - d.F.transpose() * d.D * d.F).cwiseAbs().maxCoeff();
    int m = n + 1;
    Mat Fp = kron_identity(d.F_perp(), m);
    Vec x(m);
    for (int i = 0; i < m; ++i) x[i] = 0.3 + 0.7 * i;
    Vec diag(p * m);
    for (int j = 0; j < p; ++j) diag.segment(j * m, m) = x;
    r.kernel = (Fp * diag).norm();
    return r;
}

/// f(x) = (F_perp x / |F_perp x|, (x_1 + ... + x_p)/p) on (R^{n+1})^p minus the diagonal.
struct DiagonalExcisionMap {
    int p = 2, n = 1;
    RealDFT dft;
    Mat Fperp;   // (p-1)(n+1) x p(n+1)
    Mat Fm;      // p(n+1) x p(n+1)
    Mat Dperp;   // action on the first component
    Mat shift;   // M_{n+1}
    double eps_min = tol().eps_min;

    DiagonalExcisionMap(int p_, int n_) : p(p_), n(n_), dft(build_dft(p_)) {
        Fperp = kron_identity(dft.F_perp(), n + 1);
        Fm = kron_identity(dft.F, n + 1);
        Dperp = kron_identity(dft.D_perp(), n + 1);
        shift = kron_identity(dft.M, n + 1);
    }

    int dim() const { return p * (n + 1); }
    int lens_dim() const { return (p - 1) * (n + 1); }

    /// Distance from x to the linear diagonal.
    double diagonal_distance(const Vec& x) const { return (Fperp * x).norm(); }

    Vec mean(const Vec& x) const {
        Vec m = Vec::Zero(n + 1);
        for (int j = 0; j < p; ++j) m += x.segment(j * (n + 1), n + 1);
        return m / p;
    }

    std::pair<Vec, Vec> operator()(const Vec& x) const {
        Vec y = Fperp * x;
        double r = y.norm();
        if (r <= eps_min)
            throw DomainError("point within eps_min of the diagonal: |F_perp x| = " + std::to_string(r));
        return {y / r, mean(x)};
    }

    Vec stacked(const Vec& x) const {
        auto [a, b] = (*this)(x);
        Vec out(a.size() + b.size());
        out << a, b;
        return out;
    }

    /// Analytic derivative of the stacked map, p(n+1) x p(n+1).
    Mat jacobian(const Vec& x) const {
        Vec y = Fperp * x;
        double r = y.norm();
        if (r <= eps_min)
            throw DomainError("point within eps_min of the diagonal: |F_perp x| = " + std::to_string(r));
        Vec u = y / r;
        Mat J(dim(), dim());
        J.topRows(lens_dim()) = (Mat::Identity(lens_dim(), lens_dim()) - u * u.transpose()) * Fperp / r;
        Mat A = Mat::Zero(n + 1, dim());
        for (int j = 0; j < p; ++j) A.block(0, j * (n + 1), n + 1, n + 1) = Mat::Identity(n + 1, n + 1) / p;
        J.bottomRows(n + 1) = A;
        return J;
    }

    /// A point on the unit sphere at diagonal distance exactly eps, from free directions.
    Vec point_at_distance(double eps, const Vec& diag_dir, const Vec& perp_dir) const {
        Vec c(dim());
        c.head(n + 1) = std::sqrt(std::max(0.0, 1 - eps * eps)) * diag_dir.normalized();
        c.tail(lens_dim()) = eps * perp_dir.normalized();
        return Fm.transpose() * c;
    }
};

struct JacobianSplit {
    std::vector<double> analytic;  // singular values, descending
    std::vector<double> finite_difference;
    std::vector<double> expected;
    double max_rel_error = 0;  // finite differences against expected
    int inv_eps_count = 0;     // multiplicity of 1/eps among finite-difference values
    int inv_sqrtp_count = 0;
    int zero_count = 0;
};

/// Singular values of Df at a point of the sphere at diagonal distance eps.
/// On the full space the normalization kills the radial direction of F_perp x, so the
/// values are 1/eps ((p-1)(n+1)-1 times), 1/sqrt(p) (n+1 times) and one 0.
inline JacobianSplit jacobian_split(const DiagonalExcisionMap& f, const Vec& v, double h = 1e-6,
                                    double rel_tol = 1e-4) {
    double eps = f.diagonal_distance(v);
    if (eps < f.eps_min) throw DomainError("eps below eps_min");
    JacobianSplit s;
    auto sv = [](const Mat& J) {
        Eigen::JacobiSVD<Mat> svd(J);
        Vec d = svd.singularValues();
        std::vector<double> out(d.data(), d.data() + d.size());
        std::sort(out.rbegin(), out.rend());
        return out;
    };
    s.analytic = sv(f.jacobian(v));
    Mat Jfd = Mat::Zero(f.dim(), f.dim());
    for (int i = 0; i < f.dim(); ++i) {
        Vec e = Vec::Zero(f.dim());
        e[i] = h;
        Jfd.col(i) = (f.stacked(v + e) - f.stacked(v - e)) / (2 * h);
    }
    s.finite_difference = sv(Jfd);
    double a = 1 / eps, b = 1 / std::sqrt(static_cast<double>(f.p));
    std::vector<double> ex;
    for (int i = 0; i < f.lens_dim() - 1; ++i) ex.push_back(a);
    for (int i = 0; i <= f.n; ++i) ex.push_back(b);
    ex.push_back(0);
    std::sort(ex.rbegin(), ex.rend());
    s.expected = ex;
    for (std::size_t i = 0; i < ex.size(); ++i) {
        double fd = s.finite_difference[i];
        double err = ex[i] == 0 ? std::abs(fd) / a : std::abs(fd - ex[i]) / ex[i];
        s.max_rel_error = std::max(s.max_rel_error, err);
        if (std::abs(fd - a) <= rel_tol * a) ++s.inv_eps_count;
        else if (std::abs(fd - b) <= rel_tol * b) ++s.inv_sqrtp_count;
        else if (std::abs(fd) <= rel_tol * a) ++s.zero_count;
    }
    return s;
}

// ---------------------------------------------------------------------------
// lens orbits

/// Point of S^{(p-1)(n+1)-1} modulo the rotation D_perp; the representative is the
/// lexicographically smallest of the p images.
struct LensOrbit {
    Vec rep;
    int p = 2;

    static LensOrbit canonical(const Vec& u, const Mat& Dperp, int p) {
        Vec best = u, cur = u;
        for (int j = 1; j < p; ++j) {
            cur = Dperp * cur;
            if (lex_compare(cur, best, 1e-9) < 0) best = cur;
        }
        return {best, p};
    }

    bool same_as(const LensOrbit& o, const Mat& Dperp) const {
        Vec cur = o.rep;
        for (int j = 0; j < p; ++j) {
            if ((cur - rep).norm() < 1e-9) return true;
            cur = Dperp * cur;
        }
        return false;
    }
};

/// Coordinate map L_p(l_1..l_n) -> L_p(1..1): r e^{i theta} -> r e^{i l^{-1} theta} per coordinate.
inline std::vector<std::complex<double>> lens_reindex(const std::vector<std::complex<double>>& z,
                                                      const std::vector<int>& ells, int p) {
    require_prime(p);
    if (z.size() != ells.size()) throw DomainError("one index per complex coordinate");
    std::vector<std::complex<double>> out;
    for (std::size_t j = 0; j < z.size(); ++j) {
        int inv = inverse_mod(ells[j], p);
        out.push_back(std::polar(std::abs(z[j]), inv * std::arg(z[j])));
    }
    return out;
}

// ---------------------------------------------------------------------------
// necklaces

struct Necklace {
    std::vector<int> rep;  // lexicographically minimal rotation, letters 1..k
    int orbit_size = 0;
    bool constant = false;
};

namespace detail {
inline void fkm(int t, int per, int n, int k, std::vector<int>& a, std::vector<Necklace>& out) {
    if (t > n) {
        if (n % per == 0) {
            Necklace nk;
            for (int i = 1; i <= n; ++i) nk.rep.push_back(a[i] + 1);
            nk.orbit_size = per;
            nk.constant = per == 1;
            out.push_back(std::move(nk));
        }
        return;
    }
    a[t] = a[t - per];
    fkm(t + 1, per, n, k, a, out);
    for (int j = a[t - per] + 1; j < k; ++j) {
        a[t] = j;
        fkm(t + 1, t, n, k, a, out);
    }
}
}  // namespace detail

/// Orbits of {1..k}^p under cyclic shift, in lexicographic order of representatives.
inline std::vector<Necklace> orbit_enumerate(int k, int p) {
    if (k < 1 || p < 1) return {};
    std::vector<Necklace> out;
    std::vector<int> a(p + 1, 0);
    detail::fkm(1, 1, p, k, a, out);
    return out;
}

/// Burnside count for prime p.
inline long long burnside_count(long long k, int p) {
    require_prime(p);
    long long kp = 1;
    for (int i = 0; i < p; ++i) kp *= k;
    return (kp + (p - 1) * k) / p;
}

struct FreeOrbitCount {
    long long m = 0;
    int residue_mod_p = 0;
    bool is_minus_one = false;
};

/// m = (p^p - p)/p = p^{p-1} - 1, the number of size-p orbits of (Z_p)^p.
inline FreeOrbitCount count_free_orbits(int p) {
    require_prime(p);
    long long m = 1;
    for (int i = 0; i < p - 1; ++i) m *= p;
    m -= 1;
    return {m, residue(m, p), residue(m, p) == p - 1};
}

// ---------------------------------------------------------------------------
// rank of the projection onto the diagonal

struct RankResult {
    int rank = 0;
    int bound = 0;  // ceil(sum dim / p)
    bool bound_holds = true;
    bool reorthonormalized = false;
};

inline Mat orthonormalize(const Mat& B, bool* changed = nullptr) {
    if (B.cols() == 0) return B;
    Mat G = B.transpose() * B;
    if ((G - Mat::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff() < 1e-12) return B;
    if (changed) *changed = true;
    Eigen::JacobiSVD<Mat> svd(B, Eigen::ComputeThinU);
    int r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-12) ++r;
    return svd.matrixU().leftCols(r);
}

/// Rank of the orthogonal projection Pi_1 x ... x Pi_p -> diagonal, from orthonormal
/// bases (columns) of subspaces of R^{n+1}.
inline RankResult rank_of_diagonal_projection(const std::vector<Mat>& bases) {
    RankResult res;
    int p = static_cast<int>(bases.size());
    if (p == 0) return res;
    int m = static_cast<int>(bases[0].rows());
    std::vector<Mat> B;
    int total = 0;
    for (auto& b : bases) {
        if (b.rows() != m) throw DomainError("subspaces must share the ambient R^{n+1}");
        B.push_back(orthonormalize(b, &res.reorthonormalized));
        total += static_cast<int>(B.back().cols());
    }
    res.bound = (total + p - 1) / p;
    if (total == 0) return res;
    Mat E = Mat::Zero(p * m, total);
    int col = 0;
    for (int j = 0; j < p; ++j) {
        E.block(j * m, col, m, B[j].cols()) = B[j];
        col += static_cast<int>(B[j].cols());
    }
    Mat P = kron_identity(Mat::Constant(p, p, 1.0 / p), m);
    Eigen::JacobiSVD<Mat> svd(P * E);
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-9) ++res.rank;
    res.bound_holds = res.rank >= res.bound;
    return res;
}

}  // namespace modp
