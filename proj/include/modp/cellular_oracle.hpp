#pragma once

#include "modp/bockstein_cyc.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>

namespace modp {

using BigInt = boost::multiprecision::cpp_int;
using IntMat = std::vector<std::vector<BigInt>>;  // row-major

inline IntMat int_matrix(int rows, int cols) { return IntMat(rows, std::vector<BigInt>(cols, BigInt(0))); }

inline int rows(const IntMat& M) { return static_cast<int>(M.size()); }
inline int cols(const IntMat& M, int fallback = 0) { return M.empty() ? fallback : static_cast<int>(M[0].size()); }

/// Cellular chain complex with integer boundary matrices; boundary[k] : C_k -> C_{k-1}
/// has size cells[k-1] x cells[k] (boundary[0] is empty).
struct CellComplex {
    std::string name;
    std::vector<int> cells;
    std::vector<IntMat> boundary;

    int top() const { return static_cast<int>(cells.size()) - 1; }

    IntMat d(int k) const {
        if (k <= 0 || k > top()) {
            int r = k - 1 >= 0 && k - 1 <= top() ? cells[k - 1] : 0;
            int c = k >= 0 && k <= top() ? cells[k] : 0;
            return int_matrix(r, c);
        }
        return boundary[k];
    }
};

inline IntMat multiply(const IntMat& A, const IntMat& B, int inner) {
    int r = rows(A), c = cols(B);
    IntMat C = int_matrix(r, c);
    for (int i = 0; i < r; ++i)
        for (int k = 0; k < inner; ++k)
            if (A[i][k] != 0)
                for (int j = 0; j < c; ++j) C[i][j] += A[i][k] * B[k][j];
    return C;
}

inline bool dd_zero(const CellComplex& X) {
    for (int k = 2; k <= X.top(); ++k) {
        IntMat P = multiply(X.d(k - 1), X.d(k), X.cells[k - 1]);
        for (auto& row : P)
            for (auto& v : row)
                if (v != 0) return false;
    }
    return true;
}

/// Diagonal of the Smith normal form (nonzero invariant factors, positive, dividing chain).
inline std::vector<BigInt> smith_diagonal(IntMat A) {
    int m = rows(A), n = cols(A);
    std::vector<BigInt> diag;
    int t = 0;
    while (t < m && t < n) {
        // pivot: smallest nonzero absolute value in the remaining block
        int pi = -1, pj = -1;
        BigInt best = 0;
        for (int i = t; i < m; ++i)
            for (int j = t; j < n; ++j)
                if (A[i][j] != 0 && (pi < 0 || abs(A[i][j]) < best)) {
                    best = abs(A[i][j]);
                    pi = i;
                    pj = j;
                }
        if (pi < 0) break;
        std::swap(A[t], A[pi]);
        for (auto& row : A) std::swap(row[t], row[pj]);
        bool clean = false;
        while (!clean) {
            clean = true;
            for (int i = t + 1; i < m; ++i) {
                if (A[i][t] == 0) continue;
                BigInt q = A[i][t] / A[t][t];
                for (int j = t; j < n; ++j) A[i][j] -= q * A[t][j];
                if (A[i][t] != 0) {
                    std::swap(A[t], A[i]);
                    clean = false;
                }
            }
            for (int j = t + 1; j < n; ++j) {
                if (A[t][j] == 0) continue;
                BigInt q = A[t][j] / A[t][t];
                for (int i = t; i < m; ++i) A[i][j] -= q * A[i][t];
                if (A[t][j] != 0) {
                    for (auto& row : A) std::swap(row[t], row[j]);
                    clean = false;
                }
            }
            if (clean) {
                // enforce divisibility of the rest by the pivot
                for (int i = t + 1; i < m && clean; ++i)
                    for (int j = t + 1; j < n && clean; ++j)
                        if (A[i][j] % A[t][t] != 0) {
                            for (int jj = t; jj < n; ++jj) A[t][jj] += A[i][jj];
                            clean = false;
                        }
            }
        }
        diag.push_back(abs(A[t][t]));
        ++t;
    }
    return diag;
}

struct HomologyGroup {
    int free_rank = 0;
    std::vector<BigInt> torsion;  // invariant factors > 1

    std::string str() const {
        std::string s;
        auto add = [&](const std::string& t) { s += (s.empty() ? "" : " + ") + t; };
        if (free_rank == 1) add("Z");
        if (free_rank > 1) add("Z^" + std::to_string(free_rank));
        for (auto& t : torsion) add("Z_" + t.str());
        return s.empty() ? "0" : s;
    }
};

inline std::vector<HomologyGroup> integral_homology(const CellComplex& X) {
    std::vector<HomologyGroup> H;
    for (int k = 0; k <= X.top(); ++k) {
        auto dk = smith_diagonal(X.d(k));
        auto dk1 = smith_diagonal(X.d(k + 1));
        HomologyGroup h;
        h.free_rank = X.cells[k] - static_cast<int>(dk.size()) - static_cast<int>(dk1.size());
        for (auto& v : dk1)
            if (v > 1) h.torsion.push_back(v);
        H.push_back(h);
    }
    return H;
}

// ---------------------------------------------------------------------------
// linear algebra over F_p

using ModMat = std::vector<std::vector<int>>;

inline ModMat reduce(const IntMat& A, int p) {
    ModMat M(A.size());
    for (std::size_t i = 0; i < A.size(); ++i)
        for (auto& v : A[i]) {
            BigInt r = v % p;
            if (r < 0) r += p;
            M[i].push_back(static_cast<int>(r));
        }
    return M;
}

inline ModMat transpose(const ModMat& A, int r, int c) {
    ModMat T(c, std::vector<int>(r, 0));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) T[j][i] = A[i][j];
    return T;
}

/// Row echelon form in place; returns pivot columns.
inline std::vector<int> row_reduce(ModMat& A, int p) {
    std::vector<int> piv;
    int m = static_cast<int>(A.size());
    int n = m ? static_cast<int>(A[0].size()) : 0;
    int r = 0;
    for (int c = 0; c < n && r < m; ++c) {
        int s = -1;
        for (int i = r; i < m; ++i)
            if (A[i][c] % p) {
                s = i;
                break;
            }
        if (s < 0) continue;
        std::swap(A[r], A[s]);
        int inv = inverse_mod(A[r][c], p);
        for (auto& v : A[r]) v = static_cast<int>(static_cast<long long>(v) * inv % p);
        for (int i = 0; i < m; ++i)
            if (i != r && A[i][c]) {
                int f = A[i][c];
                for (int j = 0; j < n; ++j) A[i][j] = residue(A[i][j] - static_cast<long long>(f) * A[r][j], p);
            }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

inline int rank_mod(ModMat A, int p) { return static_cast<int>(row_reduce(A, p).size()); }

/// Basis of the null space of A (r x c).
inline std::vector<std::vector<int>> nullspace_mod(ModMat A, int c, int p) {
    auto piv = row_reduce(A, p);
    std::vector<bool> is_piv(c, false);
    for (int q : piv) is_piv[q] = true;
    std::vector<std::vector<int>> out;
    for (int f = 0; f < c; ++f) {
        if (is_piv[f]) continue;
        std::vector<int> v(c, 0);
        v[f] = 1;
        for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = residue(-A[r][f], p);
        out.push_back(v);
    }
    return out;
}

/// Whether the vectors are independent modulo span(cols of B) (B given as a list of vectors).
inline bool independent_modulo(const std::vector<std::vector<int>>& vs, const std::vector<std::vector<int>>& B,
                               int p) {
    ModMat b = B, all = B;
    for (auto& v : vs) all.push_back(v);
    return rank_mod(all, p) == rank_mod(b, p) + static_cast<int>(vs.size());
}

inline bool in_span(const std::vector<int>& v, const std::vector<std::vector<int>>& B, int p) {
    bool zero = std::all_of(v.begin(), v.end(), [&](int x) { return x % p == 0; });
    if (zero) return true;
    return !independent_modulo({v}, B, p);
}

/// delta^k : C^k -> C^{k+1} over F_p, the transpose of d_{k+1}.
inline ModMat coboundary_mod(const CellComplex& X, int k, int p) {
    int r = k + 1 <= X.top() ? X.cells[k + 1] : 0;
    int c = X.cells[k];
    if (r == 0) return ModMat();
    return transpose(reduce(X.d(k + 1), p), c, r);
}

inline std::vector<int> apply_mod(const ModMat& M, const std::vector<int>& v, int p) {
    std::vector<int> out(M.size(), 0);
    for (std::size_t i = 0; i < M.size(); ++i) {
        long long s = 0;
        for (std::size_t j = 0; j < v.size(); ++j) s += static_cast<long long>(M[i][j]) * v[j];
        out[i] = residue(s, p);
    }
    return out;
}

/// Columns of delta^{k-1} as vectors in C^k: spanning set for the coboundaries B^k.
inline std::vector<std::vector<int>> coboundaries(const CellComplex& X, int k, int p) {
    std::vector<std::vector<int>> out;
    if (k == 0) return out;
    ModMat D = coboundary_mod(X, k - 1, p);
    for (int j = 0; j < X.cells[k - 1]; ++j) {
        std::vector<int> col;
        for (auto& row : D) col.push_back(row[j]);
        out.push_back(col);
    }
    return out;
}

inline int cohomology_dim_mod(const CellComplex& X, int k, int p) {
    ModMat D = coboundary_mod(X, k, p);
    int zk = X.cells[k] - (D.empty() ? 0 : rank_mod(D, p));
    int bk = 0;
    if (k > 0) {
        ModMat Dp = coboundary_mod(X, k - 1, p);
        bk = rank_mod(Dp, p);
    }
    return zk - bk;
}

/// Representatives of a basis of H^k(X; Z_p).
inline std::vector<std::vector<int>> cohomology_basis_mod(const CellComplex& X, int k, int p) {
    ModMat D = coboundary_mod(X, k, p);
    std::vector<std::vector<int>> Z;
    if (D.empty()) {
        for (int i = 0; i < X.cells[k]; ++i) {
            std::vector<int> e(X.cells[k], 0);
            e[i] = 1;
            Z.push_back(e);
        }
    } else {
        Z = nullspace_mod(D, X.cells[k], p);
    }
    auto B = coboundaries(X, k, p);
    std::vector<std::vector<int>> basis;
    for (auto& z : Z) {
        auto trial = basis;
        trial.push_back(z);
        if (independent_modulo(trial, B, p)) basis = trial;
    }
    return basis;
}

// ---------------------------------------------------------------------------

inline CellComplex lens_complex(int p, int top_dim) {
    require_prime(p);
    if (top_dim < 1) throw DomainError("top_dim must be at least 1");
    CellComplex X;
    X.name = "lens(p=" + std::to_string(p) + ", dim=" + std::to_string(top_dim) + ")";
    X.cells.assign(top_dim + 1, 1);
    X.boundary.assign(top_dim + 1, IntMat());
    for (int k = 1; k <= top_dim; ++k) {
        X.boundary[k] = int_matrix(1, 1);
        X.boundary[k][0][0] = (k % 2 == 0) ? p : 0;
    }
    return X;
}

/// Mapping cone of w -> w^p on S^1: e^0, e^1, e^2 with d e^2 = p e^1.
inline CellComplex mapping_cone_degree_p(int p) {
    require_prime(p);
    CellComplex X;
    X.name = "cone(w^" + std::to_string(p) + ")";
    X.cells = {1, 1, 1};
    X.boundary.assign(3, IntMat());
    X.boundary[1] = int_matrix(1, 1);
    X.boundary[2] = int_matrix(1, 1);
    X.boundary[2][0][0] = p;
    return X;
}

struct SnakeResult {
    std::vector<int> value;              // beta(psi) in C^{n+1}(X; Z_p)
    std::vector<int> value_second_lift;  // from an independent lift
    bool lift_independent = false;       // difference is a coboundary
    std::vector<BigInt> lift, delta_lift;
};

/// Lift psi to Z_{p^2}, apply delta, divide by p, reduce mod p.
inline SnakeResult bockstein_snake(const CellComplex& X, int n, const std::vector<int>& psi, int p,
                                   std::uint64_t seed = 1) {
    if (static_cast<int>(psi.size()) != X.cells[n]) throw DomainError("cochain has the wrong length");
    ModMat D = coboundary_mod(X, n, p);
    auto dpsi = D.empty() ? std::vector<int>() : apply_mod(D, psi, p);
    for (int v : dpsi)
        if (v) throw DomainError("input is not a cocycle mod p");
    SnakeResult r;
    int next = n + 1 <= X.top() ? X.cells[n + 1] : 0;
    IntMat dn1 = X.d(n + 1);  // cells[n] x cells[n+1]
    const long long p2 = static_cast<long long>(p) * p;
    auto run = [&](const std::vector<BigInt>& lift, std::vector<BigInt>* dl) {
        std::vector<int> out(next, 0);
        for (int j = 0; j < next; ++j) {
            BigInt s = 0;
            for (int i = 0; i < X.cells[n]; ++i) s += dn1[i][j] * lift[i];
            s %= p2;
            if (s < 0) s += p2;
            if (dl) dl->push_back(s);
            if (s % p != 0) throw DomainError("lifted coboundary not divisible by p");
            out[j] = static_cast<int>(static_cast<long long>(s / p) % p);
        }
        return out;
    };
    for (int v : psi) r.lift.push_back(BigInt(residue(v, p)));
    r.value = run(r.lift, &r.delta_lift);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> U(0, p - 1);
    std::vector<BigInt> lift2;
    for (int v : psi) lift2.push_back(BigInt(residue(v, p) + p * U(rng)));
    r.value_second_lift = run(lift2, nullptr);
    std::vector<int> diff(next);
    for (int j = 0; j < next; ++j) diff[j] = residue(r.value[j] - r.value_second_lift[j], p);
    r.lift_independent = next == 0 || in_span(diff, coboundaries(X, n + 1, p), p);
    return r;
}

struct BetaCheck {
    int degree = 0;
    int dim_source = 0, dim_target = 0;
    bool isomorphism = false;
    bool beta_beta_zero = true;
};

/// beta : H^k -> H^{k+1} on the basis of H^k; isomorphism and beta o beta = 0.
inline BetaCheck check_beta(const CellComplex& X, int k, int p) {
    BetaCheck c;
    c.degree = k;
    auto basis = cohomology_basis_mod(X, k, p);
    c.dim_source = static_cast<int>(basis.size());
    c.dim_target = k + 1 <= X.top() ? cohomology_dim_mod(X, k + 1, p) : 0;
    std::vector<std::vector<int>> images;
    for (auto& z : basis) {
        auto b = bockstein_snake(X, k, z, p);
        images.push_back(b.value);
        if (k + 2 <= X.top()) {
            auto bb = bockstein_snake(X, k + 1, b.value, p);
            if (!in_span(bb.value, coboundaries(X, k + 2, p), p)) c.beta_beta_zero = false;
        }
    }
    c.isomorphism = c.dim_source == c.dim_target &&
                    (images.empty() || (k + 1 <= X.top() && independent_modulo(images, coboundaries(X, k + 1, p), p)));
    return c;
}

// ---------------------------------------------------------------------------
// sweep count for b o g on the mapping cone

struct SweepCount {
    int p = 2;
    long long m = 0;           // p^{p-1} - 1
    long long paths = 0;       // necklace paths of size p
    long long net_inward = 0;  // signed crossings of the radius rho, summed over paths
    long long degree = 0;      // -net_inward: orientation of the sweep into D^2
    int evaluation = 0;        // degree mod p
    long long coefficient_sum = 0;  // integer sum of b coefficients at t = 1 before reduction
};

/// Points of g(t, w): w e^{2 pi i t k/p} for |k| <= (p-1)/2, and w e^{-+ i pi t/2} for p = 2.
inline std::vector<std::complex<double>> cone_family_points(int p, double t, std::complex<double> w) {
    std::vector<std::complex<double>> z;
    if (p == 2) {
        z.push_back(w * std::polar(1.0, -M_PI * t / 2));
        z.push_back(w * std::polar(1.0, M_PI * t / 2));
        return z;
    }
    for (int k = -(p - 1) / 2; k <= (p - 1) / 2; ++k) z.push_back(w * std::polar(1.0, 2 * M_PI * t * k / p));
    return z;
}

/// Feeds g(t, w) through cyc (whose disk projection is b) for t on a grid in (0, 1] and
/// counts the paths of barycenters that cross the circle of radius rho inward. The sweep
/// glues each path into D^2 with the opposite orientation, so the degree is -net_inward.
inline SweepCount evaluate_family_class(int p, int steps = 2000, double rho = 0.9, double w_angle = 0.3,
                                        bool empty_family = false) {
    require_prime(p);
    SweepCount s;
    s.p = p;
    s.m = count_free_orbits(p).m;
    if (empty_family) return s;
    std::complex<double> w = std::polar(1.0, w_angle);
    long long first = -1, last = 0;
    for (int q = 1; q <= steps; ++q) {
        double t = static_cast<double>(q) / steps;
        ZeroChain T(p, Ambient::sphere(1));
        for (auto& z : cone_family_points(p, t, w)) T.add({z.real(), z.imag()}, 1);
        auto c = cyc_0(T);
        long long inside = 0;
        for (auto& a : c.atoms)
            if (std::hypot(a.disk[0], a.disk[1]) < rho) inside += a.c;
        if (first < 0) first = inside;
        last = inside;
        if (q == steps) s.paths = static_cast<long long>(c.atoms.size());
    }
    s.net_inward = last - first;
    s.degree = -s.net_inward;
    s.evaluation = residue(s.degree, p);
    // integer multiplicities: number of size-p necklaces per content, summed
    std::vector<int> cur;
    detail::multisets(p, p, 0, cur, [&](const std::vector<int>& ms) {
        if (ms.front() == ms.back()) return;
        std::vector<int> mult;
        for (std::size_t i = 0; i < ms.size();) {
            std::size_t j = i;
            while (j < ms.size() && ms[j] == ms[i]) ++j;
            mult.push_back(static_cast<int>(j - i));
            i = j;
        }
        BigInt num = 1;
        for (int i = 2; i <= p; ++i) num *= i;
        for (int mi : mult)
            for (int i = 2; i <= mi; ++i) num /= i;
        s.coefficient_sum += static_cast<long long>(num / p);
    });
    return s;
}

}  // namespace modp
