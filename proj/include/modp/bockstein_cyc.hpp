#pragma once

#include "modp/chains.hpp"
#include "modp/cyclic_fourier.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <thread>

namespace modp {

constexpr int kBocksteinUnitCap = 40;

/// One emitted barycenter before merging: one entry per index multiset of size p.
template <class S>
struct BocksteinTerm {
    std::vector<int> units;  // sorted unit indices
    std::vector<S> x;
    int c = 0;
};

template <class S>
struct BocksteinResultT {
    std::vector<BocksteinTerm<S>> terms;  // unmerged, constant multisets removed, c != 0
    ZeroChainT<S> chain;                  // canonical relative chain on D^{n+1}
    bool coefficient_sum_warning = false;  // sum of coefficients nonzero mod p
};

using BocksteinResult = BocksteinResultT<double>;
using ExactBocksteinResult = BocksteinResultT<Rational>;

namespace detail {

template <class S>
std::vector<std::vector<S>> expand_units(const ZeroChainT<S>& T, int cap) {
    std::vector<std::vector<S>> u;
    for (auto& a : T.atoms) {
        int c = residue(a.c, T.p);
        if (static_cast<int>(u.size()) + c > cap)
            throw DomainError("unit expansion exceeds the cap of " + std::to_string(cap));
        for (int i = 0; i < c; ++i) u.push_back(a.x);
    }
    return u;
}

/// Number of necklaces of length p with content multiplicities m, reduced mod p.
inline int necklaces_with_content(const std::vector<int>& m, int p) {
    using boost::multiprecision::cpp_int;
    cpp_int num = 1;
    for (int i = 2; i <= p; ++i) num *= i;
    for (int mi : m)
        for (int i = 2; i <= mi; ++i) num /= i;
    num /= p;
    return static_cast<int>(num % p);
}

inline void multisets(int k, int size, int start, std::vector<int>& cur,
                      const std::function<void(const std::vector<int>&)>& emit) {
    if (static_cast<int>(cur.size()) == size) {
        emit(cur);
        return;
    }
    for (int i = start; i < k; ++i) {
        cur.push_back(i);
        multisets(k, size, i, cur, emit);
        cur.pop_back();
    }
}

}  // namespace detail

/// b(x_1 + ... + x_k) = sum over cyclic orbits of {1..k}^p of the barycenter
/// (x_{i_1} + ... + x_{i_p})/p, as a relative 0-chain on the disk.
template <class S>
BocksteinResultT<S> bockstein_b(const ZeroChainT<S>& T) {
    if (T.ambient.kind != AmbientKind::Sphere) throw DomainError("bockstein_b needs a Sphere ambient");
    T.validate();
    const int p = T.p;
    ZeroChainT<S> Tc = T.canonical();
    BocksteinResultT<S> r;
    long long csum = 0;
    for (auto& a : Tc.atoms) csum += a.c;
    r.coefficient_sum_warning = p > 2 && residue(csum, p) != 0;
    r.chain = ZeroChainT<S>(p, Ambient::disk(T.ambient.dim + 1), true);
    auto units = detail::expand_units(Tc, kBocksteinUnitCap);
    int k = static_cast<int>(units.size());
    if (k == 0) return r;
    std::size_t d = units[0].size();
    std::vector<int> cur;
    detail::multisets(k, p, 0, cur, [&](const std::vector<int>& ms) {
        if (ms.front() == ms.back()) return;  // constant orbit
        std::vector<int> m;
        for (std::size_t i = 0; i < ms.size();) {
            std::size_t j = i;
            while (j < ms.size() && ms[j] == ms[i]) ++j;
            m.push_back(static_cast<int>(j - i));
            i = j;
        }
        int c = detail::necklaces_with_content(m, p);
        if (c == 0) return;
        std::vector<S> x(d, S(0));
        for (int i : ms)
            for (std::size_t q = 0; q < d; ++q) x[q] += units[i][q];
        for (auto& v : x) v /= S(p);
        if (ScalarTraits<S>::outside_unit(x)) return;
        r.terms.push_back({ms, x, c});
        r.chain.atoms.push_back({x, c});
    });
    r.chain.canonicalize();
    return r;
}

inline ExactZeroChain to_exact(const ZeroChain& z) {
    ExactZeroChain e(z.p, z.ambient, z.relative);
    for (auto& a : z.atoms) {
        std::vector<Rational> x;
        for (double v : a.x) x.push_back(Rational(v));
        e.atoms.push_back({x, a.c});
    }
    return e;
}

// ---------------------------------------------------------------------------
// cyc on 0-cycles

template <class S>
struct CycAtomT {
    LensOrbit lens;
    std::vector<S> disk;
    int c = 0;
};

template <class S>
struct CycOutput0T {
    int p = 2, n = 1;
    std::vector<CycAtomT<S>> atoms;

    /// Product-ambient relative chain, lens coordinates first.
    ZeroChain as_chain() const {
        int lens = (p - 1) * (n + 1);
        ZeroChain z(p, Ambient::product(lens, n + 1), true);
        for (auto& a : atoms) {
            std::vector<double> x = to_std(a.lens.rep);
            for (auto& s : a.disk) x.push_back(ScalarTraits<S>::to_double(s));
            z.atoms.push_back({x, a.c});
        }
        return z.canonicalize();
    }

    /// Projection onto the disk factor, merged.
    ZeroChainT<S> disk_projection() const {
        ZeroChainT<S> z(p, Ambient::disk(n + 1), true);
        for (auto& a : atoms) z.atoms.push_back({a.disk, a.c});
        return z.canonicalize();
    }
};

using CycOutput0 = CycOutput0T<double>;
using ExactCycOutput0 = CycOutput0T<Rational>;

/// Every non-constant cyclic orbit of unit tuples becomes one atom (lens point of the
/// orbit, barycenter); orbits on the diagonal (all units at one point) vanish.
template <class S>
CycOutput0T<S> cyc_0(const ZeroChainT<S>& T) {
    if (T.ambient.kind != AmbientKind::Sphere) throw DomainError("cyc_0 needs a Sphere ambient");
    T.validate();
    const int p = T.p, n = T.ambient.dim;
    CycOutput0T<S> out;
    out.p = p;
    out.n = n;
    auto units = detail::expand_units(T.canonical(), kBocksteinUnitCap);
    int k = static_cast<int>(units.size());
    if (k == 0) return out;
    DiagonalExcisionMap f(p, n);
    std::vector<CycAtomT<S>> raw;
    for (auto& nk : orbit_enumerate(k, p)) {
        if (nk.constant) continue;
        Vec x(p * (n + 1));
        std::vector<S> disk(n + 1, S(0));
        for (int j = 0; j < p; ++j) {
            const auto& u = units[nk.rep[j] - 1];
            for (int q = 0; q <= n; ++q) {
                x[j * (n + 1) + q] = ScalarTraits<S>::to_double(u[q]);
                disk[q] += u[q];
            }
        }
        for (auto& v : disk) v /= S(p);
        Vec y = f.Fperp * x;
        if (y.norm() <= f.eps_min) continue;
        if (ScalarTraits<S>::outside_unit(disk)) continue;
        raw.push_back({LensOrbit::canonical(y / y.norm(), f.Dperp, p), disk, 1});
    }
    for (auto& a : raw) {
        bool merged = false;
        for (auto& b : out.atoms)
            if (point_compare(a.disk, b.disk) == 0 && (a.lens.rep - b.lens.rep).norm() < 1e-9) {
                b.c = residue(b.c + a.c, p);
                merged = true;
                break;
            }
        if (!merged) out.atoms.push_back(a);
    }
    std::erase_if(out.atoms, [](const CycAtomT<S>& a) { return a.c == 0; });
    std::sort(out.atoms.begin(), out.atoms.end(), [](const CycAtomT<S>& a, const CycAtomT<S>& b) {
        int c = point_compare(a.disk, b.disk);
        if (c != 0) return c < 0;
        return lex_compare(a.lens.rep, b.lens.rep, 1e-9) < 0;
    });
    return out;
}

// ---------------------------------------------------------------------------
// diagonal excision mass series (p = 2, k = 1)

struct DiagonalExcisionSeries {
    std::vector<int> index;       // i
    std::vector<double> radii;    // 1/i
    std::vector<double> mass;     // M(S_i)
    std::vector<double> boundary_mass;  // M(f_#(R^p restricted to the level set eps = 1/i))
    double mass_R = 0;
    long samples = 0;
    std::uint64_t seed = 0;
    int workers = 1;
    // tail fit of D_i = M_{2i} - M_i against c / i^alpha
    double fit_exponent = 0;
    double fit_r2 = 0;
    double tail_constant = 0;  // max_i i * D_i
    double boundary_ratio_max = 0;
    bool monotone = true;
};

struct MassSeriesOptions {
    int i_max = 16;
    long samples = 1000000;
    std::uint64_t seed = 7;
    int workers = 1;
    int level_grid = 256;  // marching-squares cells per edge pair side
};

namespace detail {

/// Unit-speed parametrization of a geodesic arc a -> b on the sphere.
struct Arc {
    Vec a, b, tangent;
    double length = 0;
    int weight = 1;

    Vec at(double s) const { return std::cos(s) * a + std::sin(s) * tangent; }
    Vec velocity(double s) const { return -std::sin(s) * a + std::cos(s) * tangent; }
};

inline std::vector<Arc> arcs_of(const SimplicialChain& R) {
    std::vector<Arc> arcs;
    for (auto& s : R.simplices) {
        Arc g;
        g.a = s.v[0].normalized();
        g.b = s.v[1].normalized();
        g.length = R.ambient.distance(g.a, g.b);
        Vec t = g.b - g.a.dot(g.b) * g.a;
        if (t.norm() < 1e-14) throw DomainError("degenerate or antipodal arc");
        g.tangent = t.normalized();
        g.weight = weight(s.c, R.p);
        arcs.push_back(g);
    }
    return arcs;
}

/// Point of the unit sphere of R^{2(n+1)} for parameters (s, t) of arcs A, B.
inline Vec pair_point(const Arc& A, const Arc& B, double s, double t) {
    Vec x(A.a.size() * 2);
    x << A.at(s), B.at(t);
    return x / std::sqrt(2.0);
}

/// Area element of f composed with the parametrization.
inline double pair_area_element(const DiagonalExcisionMap& f, const Arc& A, const Arc& B, double s,
                                double t, double* eps_out) {
    int m = static_cast<int>(A.a.size());
    Vec x = pair_point(A, B, s, t);
    Vec y = f.Fperp * x;
    double r = y.norm();
    *eps_out = r;
    if (r <= f.eps_min) return 0;
    Vec u = y / r;
    Vec ts = Vec::Zero(2 * m), tt = Vec::Zero(2 * m);
    ts.head(m) = A.velocity(s) / std::sqrt(2.0);
    tt.tail(m) = B.velocity(t) / std::sqrt(2.0);
    auto push = [&](const Vec& v) {
        Vec w = f.Fperp * v;
        Vec lens = (w - u * u.dot(w)) / r;
        Vec mean = 0.5 * (v.head(m) + v.tail(m));
        Vec out(lens.size() + m);
        out << lens, mean;
        return out;
    };
    Vec a = push(ts), b = push(tt);
    double g = a.squaredNorm() * b.squaredNorm() - std::pow(a.dot(b), 2);
    return std::sqrt(std::max(g, 0.0));
}

}  // namespace detail

inline void fit_power_tail(DiagonalExcisionSeries& s) {
    std::vector<double> lx, ly;
    for (std::size_t q = 0; q < s.index.size(); ++q) {
        int i = s.index[q];
        auto it = std::find(s.index.begin(), s.index.end(), 2 * i);
        if (it == s.index.end()) continue;
        double d = s.mass[it - s.index.begin()] - s.mass[q];
        s.tail_constant = std::max(s.tail_constant, i * d);
        if (d > 0) {
            lx.push_back(std::log(i));
            ly.push_back(std::log(d));
        }
    }
    if (lx.size() < 2) return;
    double n = static_cast<double>(lx.size());
    double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t q = 0; q < lx.size(); ++q) {
        sxy += (lx[q] - mx) * (ly[q] - my);
        sxx += (lx[q] - mx) * (lx[q] - mx);
        syy += (ly[q] - my) * (ly[q] - my);
    }
    double slope = sxy / sxx;
    s.fit_exponent = -slope;
    s.fit_r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
}

/// Monte Carlo masses of S_i = f_#(R^2 outside the 1/i neighbourhood of the diagonal)
/// for a cycle of geodesic arcs on S^n, with p = 2. Sampling is stratified by arc pair,
/// uses one seed per stratum and the same samples for every i.
inline DiagonalExcisionSeries cyc_poly_mass_series(const SimplicialChain& R, const MassSeriesOptions& opt = {}) {
    if (R.ambient.kind != AmbientKind::Sphere) throw DomainError("mass series needs a Sphere ambient");
    if (R.k != 1 || R.p != 2)
        throw DomainError("mass series is implemented for p = 2 and k = 1 (compute budget)");
    DiagonalExcisionSeries out;
    out.samples = opt.samples;
    out.seed = opt.seed;
    out.workers = std::max(1, opt.workers);
    for (int i = 1; i <= opt.i_max; ++i) {
        out.index.push_back(i);
        out.radii.push_back(1.0 / i);
    }
    out.mass.assign(opt.i_max, 0.0);
    out.boundary_mass.assign(opt.i_max, 0.0);
    SimplicialChain Rc = R.canonical();
    if (Rc.simplices.empty()) return out;
    if (!boundary(Rc).is_zero()) throw DomainError("input is not a cycle mod p");
    out.mass_R = Rc.mass();
    const int n = R.ambient.dim;
    DiagonalExcisionMap f(2, n);
    auto arcs = detail::arcs_of(Rc);
    const std::size_t E = arcs.size();
    double total_area = out.mass_R * out.mass_R;

    // per-stratum partial sums, combined in stratum order
    std::vector<std::vector<double>> part_mass(E * E, std::vector<double>(opt.i_max, 0.0));
    std::vector<std::vector<double>> part_bdry(E * E, std::vector<double>(opt.i_max, 0.0));
    auto stratum = [&](std::size_t idx) {
        const auto& A = arcs[idx / E];
        const auto& B = arcs[idx % E];
        double area = A.length * B.length;
        long ns = std::max<long>(16, std::lround(opt.samples * area / total_area));
        std::mt19937_64 rng(mix_seed(opt.seed, idx));
        std::uniform_real_distribution<double> U(0.0, 1.0);
        // ordered pairs cover the quotient by the cyclic action twice
        double w = 0.5 * A.weight * B.weight;
        // stratified in a sqrt(ns) x sqrt(ns) grid of the pair rectangle
        long g = std::max<long>(1, std::lround(std::sqrt(static_cast<double>(ns))));
        long count = g * g;
        for (long c = 0; c < count; ++c) {
            double s = (c / g + U(rng)) / g * A.length;
            double t = (c % g + U(rng)) / g * B.length;
            double eps;
            double J = detail::pair_area_element(f, A, B, s, t, &eps);
            double contrib = w * J * area / count;
            for (int i = 1; i <= opt.i_max; ++i)
                if (eps >= 1.0 / i) part_mass[idx][i - 1] += contrib;
        }
        // level sets eps = 1/i by marching squares
        int G = opt.level_grid;
        std::vector<double> ev((G + 1) * (G + 1));
        std::vector<Vec> img((G + 1) * (G + 1));
        for (int a = 0; a <= G; ++a)
            for (int b = 0; b <= G; ++b) {
                double s = A.length * a / G, t = B.length * b / G;
                Vec x = detail::pair_point(A, B, s, t);
                ev[a * (G + 1) + b] = f.diagonal_distance(x);
            }
        for (int i = 1; i <= opt.i_max; ++i) {
            double L = 1.0 / i;
            double len = 0;
            auto interp = [&](int a0, int b0, int a1, int b1) {
                double e0 = ev[a0 * (G + 1) + b0], e1 = ev[a1 * (G + 1) + b1];
                double lam = (L - e0) / (e1 - e0);
                double s = A.length * (a0 + lam * (a1 - a0)) / G;
                double t = B.length * (b0 + lam * (b1 - b0)) / G;
                return f.stacked(detail::pair_point(A, B, s, t));
            };
            for (int a = 0; a < G; ++a)
                for (int b = 0; b < G; ++b) {
                    int corners[4][2] = {{a, b}, {a + 1, b}, {a + 1, b + 1}, {a, b + 1}};
                    std::vector<Vec> hits;
                    for (int e = 0; e < 4; ++e) {
                        auto [a0, b0] = std::pair{corners[e][0], corners[e][1]};
                        auto [a1, b1] = std::pair{corners[(e + 1) % 4][0], corners[(e + 1) % 4][1]};
                        double e0 = ev[a0 * (G + 1) + b0] - L, e1 = ev[a1 * (G + 1) + b1] - L;
                        if ((e0 < 0) != (e1 < 0)) hits.push_back(interp(a0, b0, a1, b1));
                    }
                    if (hits.size() == 2) {
                        len += (hits[0] - hits[1]).norm();
                    } else if (hits.size() == 4) {
                        len += (hits[0] - hits[1]).norm() + (hits[2] - hits[3]).norm();
                    }
                }
            part_bdry[idx][i - 1] = w * len;
        }
    };
    std::vector<std::thread> pool;
    for (int wkr = 0; wkr < out.workers; ++wkr)
        pool.emplace_back([&, wkr] {
            for (std::size_t idx = wkr; idx < E * E; idx += out.workers) stratum(idx);
        });
    for (auto& th : pool) th.join();
    for (std::size_t idx = 0; idx < E * E; ++idx)
        for (int i = 0; i < opt.i_max; ++i) {
            out.mass[i] += part_mass[idx][i];
            out.boundary_mass[i] += part_bdry[idx][i];
        }
    for (int i = 1; i < opt.i_max; ++i)
        if (out.mass[i] < out.mass[i - 1]) out.monotone = false;
    for (int i = 0; i < opt.i_max; ++i)
        out.boundary_ratio_max = std::max(out.boundary_ratio_max, out.boundary_mass[i] / out.mass_R);
    fit_power_tail(out);
    return out;
}

/// Geodesic regular polygon through e_0, e_1 in S^n with m vertices (a great circle).
inline SimplicialChain equatorial_polygon(int n, int m, int p = 2) {
    SimplicialChain R(p, Ambient::sphere(n), 1);
    for (int j = 0; j < m; ++j) {
        Vec a = Vec::Zero(n + 1), b = Vec::Zero(n + 1);
        a[0] = std::cos(2 * M_PI * j / m);
        a[1] = std::sin(2 * M_PI * j / m);
        b[0] = std::cos(2 * M_PI * (j + 1) / m);
        b[1] = std::sin(2 * M_PI * (j + 1) / m);
        R.add({a, b}, 1);
    }
    return R.canonicalize();
}

}  // namespace modp
