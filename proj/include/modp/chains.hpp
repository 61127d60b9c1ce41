#pragma once

#include "modp/core.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <utility>

namespace modp {

using Rational = boost::multiprecision::cpp_rational;

enum class AmbientKind { Sphere, Disk, Product, Euclidean };

inline std::string to_string(AmbientKind k) {
    switch (k) {
        case AmbientKind::Sphere: return "sphere";
        case AmbientKind::Disk: return "disk";
        case AmbientKind::Product: return "product";
        case AmbientKind::Euclidean: return "euclidean";
    }
    return "?";
}

/// Where a chain lives. Sphere(n) has coordinates in R^{n+1}; Product stores
/// lens coordinates first and the disk factor in the trailing disk_dim slots.
struct Ambient {
    AmbientKind kind = AmbientKind::Euclidean;
    int dim = 0;
    int disk_dim = 0;

    static Ambient sphere(int n) { return {AmbientKind::Sphere, n, 0}; }
    static Ambient disk(int m) { return {AmbientKind::Disk, m, 0}; }
    static Ambient euclidean(int d) { return {AmbientKind::Euclidean, d, 0}; }
    static Ambient product(int lens_coords, int disk) {
        return {AmbientKind::Product, lens_coords + disk, disk};
    }

    int coord_dim() const { return kind == AmbientKind::Sphere ? dim + 1 : dim; }
    bool has_boundary() const { return kind == AmbientKind::Disk || kind == AmbientKind::Product; }

    bool operator==(const Ambient& o) const {
        return kind == o.kind && dim == o.dim && disk_dim == o.disk_dim;
    }
    bool operator!=(const Ambient& o) const { return !(*this == o); }

    /// Geodesic on the sphere, Euclidean otherwise.
    double distance(const Vec& a, const Vec& b) const {
        if (kind == AmbientKind::Sphere) {
            double c = a.dot(b) / (a.norm() * b.norm());
            return std::acos(std::clamp(c, -1.0, 1.0));
        }
        return (a - b).norm();
    }

    Vec disk_part(const Vec& x) const {
        if (kind == AmbientKind::Product) return x.tail(disk_dim);
        return x;
    }

    double boundary_distance(const Vec& x) const {
        if (!has_boundary()) return std::numeric_limits<double>::infinity();
        return 1.0 - disk_part(x).norm();
    }

    bool in_boundary_region(const Vec& x) const {
        return has_boundary() && boundary_distance(x) <= tol().amb;
    }

    void validate_point(const Vec& x) const {
        if (x.size() != coord_dim())
            throw InvalidChain("point has " + std::to_string(x.size()) + " coordinates, ambient needs " +
                               std::to_string(coord_dim()));
        if (!x.allFinite()) throw InvalidChain("non-finite coordinate");
        if (kind == AmbientKind::Sphere && std::abs(x.norm() - 1.0) > tol().amb)
            throw InvalidChain("sphere point off the unit sphere by " + std::to_string(std::abs(x.norm() - 1.0)));
    }
};

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static bool equal(double a, double b) { return std::abs(a - b) <= tol().merge; }
    static bool less(double a, double b) { return a < b - tol().merge; }
    static double to_double(double a) { return a; }
    static bool outside_unit(const std::vector<double>& x, std::size_t from = 0) {
        double s = 0;
        for (std::size_t i = from; i < x.size(); ++i) s += x[i] * x[i];
        return std::sqrt(s) >= 1.0 - tol().amb;
    }
};

template <>
struct ScalarTraits<Rational> {
    static bool equal(const Rational& a, const Rational& b) { return a == b; }
    static bool less(const Rational& a, const Rational& b) { return a < b; }
    static double to_double(const Rational& a) { return a.convert_to<double>(); }
    static bool outside_unit(const std::vector<Rational>& x, std::size_t from = 0) {
        Rational s = 0;
        for (std::size_t i = from; i < x.size(); ++i) s += x[i] * x[i];
        return s >= 1;
    }
};

template <class S>
struct AtomT {
    std::vector<S> x;
    int c = 0;
};

template <class S>
int point_compare(const std::vector<S>& a, const std::vector<S>& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (ScalarTraits<S>::less(a[i], b[i])) return -1;
        if (ScalarTraits<S>::less(b[i], a[i])) return 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

/// Finite Z_p-linear combination of points.
template <class S>
struct ZeroChainT {
    int p = 2;
    Ambient ambient = Ambient::euclidean(0);
    bool relative = false;
    std::vector<AtomT<S>> atoms;

    ZeroChainT() = default;
    ZeroChainT(int p_, Ambient a, bool rel = false) : p(p_), ambient(a), relative(rel) {}

    void add(std::vector<S> x, long long c) { atoms.push_back({std::move(x), residue(c, p)}); }

    bool empty() const { return atoms.empty(); }

    /// Merge coincident atoms, drop zero coefficients, apply relative vanishing, sort.
    ZeroChainT& canonicalize() {
        for (auto& a : atoms) a.c = residue(a.c, p);
        std::stable_sort(atoms.begin(), atoms.end(),
                         [](const AtomT<S>& u, const AtomT<S>& v) { return point_compare(u.x, v.x) < 0; });
        std::vector<AtomT<S>> out;
        for (auto& a : atoms) {
            bool merged = false;
            for (auto it = out.rbegin(); it != out.rend(); ++it) {
                if (it->x.empty() || a.x.empty()) break;
                if (ScalarTraits<S>::less(it->x[0], a.x[0])) break;
                if (point_compare(it->x, a.x) == 0) {
                    it->c = residue(it->c + a.c, p);
                    merged = true;
                    break;
                }
            }
            if (!merged) out.push_back(std::move(a));
        }
        std::vector<AtomT<S>> kept;
        std::size_t from = ambient.kind == AmbientKind::Product ? ambient.dim - ambient.disk_dim : 0;
        for (auto& a : out) {
            if (a.c == 0) continue;
            if (relative && ambient.has_boundary() && ScalarTraits<S>::outside_unit(a.x, from)) continue;
            kept.push_back(std::move(a));
        }
        atoms = std::move(kept);
        return *this;
    }

    ZeroChainT canonical() const {
        ZeroChainT c = *this;
        c.canonicalize();
        return c;
    }

    ZeroChainT operator-() const {
        ZeroChainT r = *this;
        for (auto& a : r.atoms) a.c = residue(-a.c, p);
        return r;
    }

    ZeroChainT operator+(const ZeroChainT& o) const {
        check_compatible(o);
        ZeroChainT r = *this;
        r.atoms.insert(r.atoms.end(), o.atoms.begin(), o.atoms.end());
        return r.canonicalize();
    }

    ZeroChainT operator-(const ZeroChainT& o) const { return *this + (-o); }

    ZeroChainT scaled(long long a) const {
        ZeroChainT r = *this;
        for (auto& at : r.atoms) at.c = residue(static_cast<long long>(at.c) * a, p);
        return r.canonicalize();
    }

    void check_compatible(const ZeroChainT& o) const {
        if (p != o.p) throw DomainError("mismatched moduli");
        if (ambient != o.ambient) throw DomainError("mismatched ambients");
    }

    /// Sum of weights; every atom has unit 0-volume.
    double mass() const {
        ZeroChainT c = canonical();
        double m = 0;
        for (auto& a : c.atoms) m += weight(a.c, p);
        return m;
    }

    /// Total number of unit atoms after choosing the lighter sign for each coefficient.
    int units() const {
        int u = 0;
        for (auto& a : atoms) u += weight(a.c, p);
        return u;
    }

    bool equals(const ZeroChainT& o) const {
        if (p != o.p) return false;
        ZeroChainT a = canonical(), b = o.canonical();
        if (a.atoms.size() != b.atoms.size()) return false;
        for (std::size_t i = 0; i < a.atoms.size(); ++i) {
            if (a.atoms[i].c != b.atoms[i].c) return false;
            if (point_compare(a.atoms[i].x, b.atoms[i].x) != 0) return false;
        }
        return true;
    }

    void validate() const {
        require_prime(p);
        for (auto& a : atoms) {
            std::vector<double> xd;
            for (auto& s : a.x) xd.push_back(ScalarTraits<S>::to_double(s));
            ambient.validate_point(to_vec(xd));
        }
    }
};

using ZeroChain = ZeroChainT<double>;
using ExactZeroChain = ZeroChainT<Rational>;

inline ZeroChain to_double(const ExactZeroChain& e) {
    ZeroChain z(e.p, e.ambient, e.relative);
    for (auto& a : e.atoms) {
        std::vector<double> x;
        for (auto& s : a.x) x.push_back(s.convert_to<double>());
        z.atoms.push_back({x, a.c});
    }
    return z;
}

inline Vec atom_vec(const AtomT<double>& a) { return to_vec(a.x); }

// ---------------------------------------------------------------------------
// simplicial chains

struct Simplex {
    std::vector<Vec> v;
    int c = 0;
    int dim() const { return static_cast<int>(v.size()) - 1; }
};

/// Sign of the permutation that sorts idx.
inline int permutation_sign(std::vector<int> idx) {
    int sign = 1;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        while (idx[i] != static_cast<int>(i)) {
            std::swap(idx[i], idx[idx[i]]);
            sign = -sign;
        }
    }
    return sign;
}

/// k-volume of the convex hull of the vertices (Gram determinant).
inline double flat_volume(const std::vector<Vec>& v) {
    int k = static_cast<int>(v.size()) - 1;
    if (k <= 0) return 1.0;
    Mat E(v[0].size(), k);
    for (int i = 0; i < k; ++i) E.col(i) = v[i + 1] - v[0];
    double g = (E.transpose() * E).determinant();
    double fact = 1;
    for (int i = 2; i <= k; ++i) fact *= i;
    return std::sqrt(std::max(g, 0.0)) / fact;
}

struct SimplicialChain {
    int p = 2;
    Ambient ambient = Ambient::euclidean(0);
    bool relative = false;
    int k = 0;
    std::vector<Simplex> simplices;

    SimplicialChain() = default;
    SimplicialChain(int p_, Ambient a, int k_, bool rel = false) : p(p_), ambient(a), relative(rel), k(k_) {}

    void add(std::vector<Vec> verts, long long c) {
        if (static_cast<int>(verts.size()) != k + 1) throw InvalidChain("simplex has wrong vertex count");
        simplices.push_back({std::move(verts), residue(c, p)});
    }

    bool empty() const { return simplices.empty(); }

    /// k-volume of one simplex; arcs on the sphere use geodesic length.
    double volume(const Simplex& s) const {
        if (k == 1 && ambient.kind == AmbientKind::Sphere) return ambient.distance(s.v[0], s.v[1]);
        return flat_volume(s.v);
    }

    bool supported_in_boundary(const Simplex& s) const {
        if (!relative || !ambient.has_boundary()) return false;
        for (auto& x : s.v)
            if (!ambient.in_boundary_region(x)) return false;
        return true;
    }

    /// Sort vertices (tracking orientation), merge equal simplices, drop zeros.
    SimplicialChain& canonicalize() {
        for (auto& s : simplices) {
            std::vector<int> idx(s.v.size());
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(),
                             [&](int a, int b) { return lex_compare(s.v[a], s.v[b], tol().merge) < 0; });
            std::vector<Vec> nv;
            for (int i : idx) nv.push_back(s.v[i]);
            s.c = residue(static_cast<long long>(s.c) * permutation_sign(idx), p);
            s.v = std::move(nv);
        }
        auto cmp = [](const Simplex& a, const Simplex& b) {
            for (std::size_t i = 0; i < a.v.size(); ++i) {
                int c = lex_compare(a.v[i], b.v[i], tol().merge);
                if (c != 0) return c < 0;
            }
            return false;
        };
        std::stable_sort(simplices.begin(), simplices.end(), cmp);
        std::vector<Simplex> out;
        for (auto& s : simplices) {
            bool merged = false;
            for (auto it = out.rbegin(); it != out.rend(); ++it) {
                int c0 = lex_compare(it->v[0], s.v[0], tol().merge);
                if (c0 < 0) break;
                bool same = true;
                for (std::size_t i = 0; i < s.v.size() && same; ++i)
                    same = lex_compare(it->v[i], s.v[i], tol().merge) == 0;
                if (same) {
                    it->c = residue(it->c + s.c, p);
                    merged = true;
                    break;
                }
            }
            if (!merged) out.push_back(std::move(s));
        }
        simplices.clear();
        for (auto& s : out)
            if (s.c != 0 && !supported_in_boundary(s)) simplices.push_back(std::move(s));
        return *this;
    }

    SimplicialChain canonical() const {
        SimplicialChain c = *this;
        c.canonicalize();
        return c;
    }

    SimplicialChain operator-() const {
        SimplicialChain r = *this;
        for (auto& s : r.simplices) s.c = residue(-s.c, p);
        return r;
    }

    SimplicialChain operator+(const SimplicialChain& o) const {
        if (p != o.p || k != o.k) throw DomainError("incompatible chains");
        SimplicialChain r = *this;
        r.simplices.insert(r.simplices.end(), o.simplices.begin(), o.simplices.end());
        return r.canonicalize();
    }

    SimplicialChain operator-(const SimplicialChain& o) const { return *this + (-o); }

    SimplicialChain scaled(long long a) const {
        SimplicialChain r = *this;
        for (auto& s : r.simplices) s.c = residue(static_cast<long long>(s.c) * a, p);
        return r.canonicalize();
    }

    void validate() const {
        require_prime(p);
        for (auto& s : simplices) {
            if (s.dim() != k) throw InvalidChain("simplex dimension mismatch");
            for (auto& x : s.v) ambient.validate_point(x);
            if (k >= 1 && volume(s) <= tol().vol) throw InvalidChain("degenerate simplex");
        }
    }

    double mass() const {
        SimplicialChain c = canonical();
        double m = 0;
        for (auto& s : c.simplices) {
            if (k >= 1 && volume(s) <= tol().vol) throw InvalidChain("degenerate simplex");
            m += weight(s.c, p) * volume(s);
        }
        return m;
    }

    bool is_zero() const { return canonical().simplices.empty(); }
};

inline SimplicialChain boundary(const SimplicialChain& T) {
    if (T.k < 1) throw DomainError("boundary needs k >= 1");
    SimplicialChain b(T.p, T.ambient, T.k - 1, T.relative);
    for (auto& s : T.simplices) {
        for (int i = 0; i <= T.k; ++i) {
            std::vector<Vec> f;
            for (int j = 0; j <= T.k; ++j)
                if (j != i) f.push_back(s.v[j]);
            b.simplices.push_back({std::move(f), residue((i % 2 ? -1LL : 1LL) * s.c, T.p)});
        }
    }
    return b.canonicalize();
}

inline ZeroChain to_zero_chain(const SimplicialChain& c) {
    if (c.k != 0) throw DomainError("not a 0-chain");
    ZeroChain z(c.p, c.ambient, c.relative);
    for (auto& s : c.simplices) z.atoms.push_back({to_std(s.v[0]), s.c});
    return z.canonicalize();
}

inline SimplicialChain to_simplicial(const ZeroChain& z) {
    SimplicialChain c(z.p, z.ambient, 0, z.relative);
    for (auto& a : z.atoms) c.simplices.push_back({{to_vec(a.x)}, a.c});
    return c.canonicalize();
}

/// Monte Carlo check that distinct simplices overlap in measure < tau_overlap.
inline bool non_overlapping(const SimplicialChain& T, int samples = 2000, std::uint64_t seed = 1) {
    if (T.k == 0) return true;
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> ex(1.0);
    auto inside = [&](const Simplex& s, const Vec& x) {
        int k = s.dim();
        Mat E(x.size(), k);
        for (int i = 0; i < k; ++i) E.col(i) = s.v[i + 1] - s.v[0];
        Vec lam = E.colPivHouseholderQr().solve(x - s.v[0]);
        if ((E * lam - (x - s.v[0])).norm() > 1e-9) return false;
        return lam.minCoeff() > 1e-12 && lam.sum() < 1 - 1e-12;
    };
    for (std::size_t i = 0; i < T.simplices.size(); ++i) {
        for (std::size_t j = i + 1; j < T.simplices.size(); ++j) {
            const auto& a = T.simplices[i];
            const auto& b = T.simplices[j];
            int hit = 0;
            for (int s = 0; s < samples; ++s) {
                std::vector<double> w(T.k + 1);
                double tot = 0;
                for (auto& wi : w) tot += (wi = ex(rng));
                Vec x = Vec::Zero(a.v[0].size());
                for (int m = 0; m <= T.k; ++m) x += (w[m] / tot) * a.v[m];
                if (inside(b, x)) ++hit;
            }
            double overlap = T.volume(a) * hit / samples;
            if (overlap >= tol().overlap) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// products

namespace detail {
/// All monotone lattice paths from (0,0) to (a,b).
inline void lattice_paths(int a, int b, std::vector<std::vector<std::pair<int, int>>>& out,
                          std::vector<std::pair<int, int>>& cur) {
    auto [i, j] = cur.back();
    if (i == a && j == b) {
        out.push_back(cur);
        return;
    }
    if (i < a) {
        cur.push_back({i + 1, j});
        lattice_paths(a, b, out, cur);
        cur.pop_back();
    }
    if (j < b) {
        cur.push_back({i, j + 1});
        lattice_paths(a, b, out, cur);
        cur.pop_back();
    }
}
}  // namespace detail

/// Staircase triangulation of the prism of two simplices with product orientation.
inline std::vector<std::pair<std::vector<std::pair<int, int>>, int>> staircase(int a, int b) {
    std::vector<std::vector<std::pair<int, int>>> paths;
    std::vector<std::pair<int, int>> cur{{0, 0}};
    detail::lattice_paths(a, b, paths, cur);
    std::vector<std::pair<std::vector<std::pair<int, int>>, int>> out;
    for (auto& path : paths) {
        int n = a + b;
        int sign = 1;
        if (n > 0) {
            Mat M = Mat::Zero(n, n);
            for (int m = 1; m <= n; ++m) {
                auto [i, j] = path[m];
                if (i > 0) M(m - 1, i - 1) = 1;
                if (j > 0) M(m - 1, a + j - 1) = 1;
            }
            sign = M.determinant() > 0 ? 1 : -1;
        }
        out.push_back({path, sign});
    }
    return out;
}

inline SimplicialChain cartesian_product(const SimplicialChain& S, const SimplicialChain& T) {
    if (S.p != T.p) throw DomainError("mismatched moduli");
    auto flat = [](const Ambient& a) {
        return a.kind == AmbientKind::Euclidean || a.kind == AmbientKind::Disk;
    };
    if (!flat(S.ambient) || !flat(T.ambient)) throw DomainError("product needs Euclidean or Disk ambients");
    int k = S.k + T.k;
    if (k > 16) throw DomainError("product dimension overflow");
    int d1 = S.ambient.coord_dim(), d2 = T.ambient.coord_dim();
    SimplicialChain out(S.p, Ambient::euclidean(d1 + d2), k);
    auto cells = staircase(S.k, T.k);
    for (auto& s : S.simplices) {
        for (auto& t : T.simplices) {
            long long c = static_cast<long long>(s.c) * t.c;
            if (residue(c, S.p) == 0) continue;
            for (auto& [path, sign] : cells) {
                std::vector<Vec> verts;
                for (auto [i, j] : path) {
                    Vec v(d1 + d2);
                    v << s.v[i], t.v[j];
                    verts.push_back(v);
                }
                out.simplices.push_back({std::move(verts), residue(c * sign, S.p)});
            }
        }
    }
    return out.canonicalize();
}

inline ZeroChain cartesian_product(const ZeroChain& S, const ZeroChain& T) {
    if (S.p != T.p) throw DomainError("mismatched moduli");
    int d1 = S.ambient.coord_dim(), d2 = T.ambient.coord_dim();
    ZeroChain out(S.p, Ambient::euclidean(d1 + d2));
    for (auto& a : S.atoms)
        for (auto& b : T.atoms) {
            std::vector<double> x = a.x;
            x.insert(x.end(), b.x.begin(), b.x.end());
            out.add(x, static_cast<long long>(a.c) * b.c);
        }
    return out.canonicalize();
}

// ---------------------------------------------------------------------------
// pushforward

struct MapDescriptor {
    std::function<Vec(const Vec&)> f;
    std::function<Mat(const Vec&)> jacobian;  // optional; central differences otherwise
    Ambient target = Ambient::euclidean(0);
    bool affine = false;
};

inline Mat numeric_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h = 1e-6) {
    Vec f0 = f(x);
    Mat J(f0.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        J.col(i) = (f(xp) - f(xm)) / (2 * h);
    }
    return J;
}

struct PushforwardResult {
    SimplicialChain image;
    double mass_estimate = 0;
    long samples = 0;
    long failed_samples = 0;
    bool singular = false;
    std::string warning;
};

namespace detail {
inline std::vector<std::vector<Vec>> subdivide(const std::vector<Vec>& s, int depth) {
    std::vector<std::vector<Vec>> cur{s};
    int k = static_cast<int>(s.size()) - 1;
    for (int d = 0; d < depth; ++d) {
        std::vector<std::vector<Vec>> next;
        for (auto& t : cur) {
            if (k == 1) {
                Vec m = 0.5 * (t[0] + t[1]);
                next.push_back({t[0], m});
                next.push_back({m, t[1]});
            } else if (k == 2) {
                Vec m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m02 = 0.5 * (t[0] + t[2]);
                next.push_back({t[0], m01, m02});
                next.push_back({m01, t[1], m12});
                next.push_back({m02, m12, t[2]});
                next.push_back({m01, m12, m02});
            } else {
                throw DomainError("subdivision implemented for k <= 2");
            }
        }
        cur = std::move(next);
    }
    return cur;
}
}  // namespace detail

/// Image chain (vertexwise, after `depth` midpoint subdivisions) and a Monte Carlo
/// estimate of the image mass from the Jacobian.
inline PushforwardResult pushforward(const SimplicialChain& T, const MapDescriptor& m, int depth = 0,
                                     int samples_per_simplex = 256, std::uint64_t seed = 1) {
    PushforwardResult r;
    r.image = SimplicialChain(T.p, m.target, T.k);
    if (m.affine) depth = 0;
    std::exponential_distribution<double> ex(1.0);
    for (std::size_t si = 0; si < T.simplices.size(); ++si) {
        const auto& s = T.simplices[si];
        for (auto& piece : detail::subdivide(s.v, depth)) {
            std::vector<Vec> img;
            try {
                for (auto& v : piece) img.push_back(m.f(v));
            } catch (const DomainError& e) {
                r.singular = true;
                r.warning = e.what();
                continue;
            }
            r.image.simplices.push_back({std::move(img), s.c});
        }
        if (T.k == 0) {
            r.mass_estimate += weight(s.c, T.p);
            continue;
        }
        std::mt19937_64 rng(mix_seed(seed, si));
        int k = T.k;
        Mat E(s.v[0].size(), k);
        for (int i = 0; i < k; ++i) E.col(i) = s.v[i + 1] - s.v[0];
        double fact = 1;
        for (int i = 2; i <= k; ++i) fact *= i;
        double acc = 0;
        int ok = 0;
        for (int n = 0; n < samples_per_simplex; ++n) {
            std::vector<double> w(k + 1);
            double tot = 0;
            for (auto& wi : w) tot += (wi = ex(rng));
            Vec x = s.v[0];
            for (int i = 0; i < k; ++i) x += (w[i + 1] / tot) * E.col(i);
            try {
                Mat J = m.jacobian ? m.jacobian(x) : numeric_jacobian(m.f, x);
                Mat G = J * E;
                acc += std::sqrt(std::max((G.transpose() * G).determinant(), 0.0));
                ++ok;
            } catch (const DomainError& e) {
                r.singular = true;
                r.warning = e.what();
                ++r.failed_samples;
            }
            ++r.samples;
        }
        if (ok > 0) r.mass_estimate += weight(s.c, T.p) * acc / ok / fact;
    }
    r.image.canonicalize();
    return r;
}

// ---------------------------------------------------------------------------
// restriction to balls and mass concentration

/// Length of the part of segment [a,b] at distance < r from c.
inline double segment_ball_length(const Vec& a, const Vec& b, const Vec& c, double r) {
    Vec d = b - a;
    double A = d.squaredNorm();
    if (A == 0) return 0;
    Vec w = a - c;
    double B = 2 * w.dot(d), C = w.squaredNorm() - r * r;
    double disc = B * B - 4 * A * C;
    if (disc <= 0) return 0;
    double sq = std::sqrt(disc);
    double t1 = std::max(0.0, (-B - sq) / (2 * A)), t2 = std::min(1.0, (-B + sq) / (2 * A));
    return t2 > t1 ? (t2 - t1) * std::sqrt(A) : 0.0;
}

/// Mass of T restricted to the open ball B(c, r). Exact for k <= 1, Monte Carlo otherwise.
inline double mass_in_ball(const SimplicialChain& T, const Vec& c, double r, int samples = 4000,
                           std::uint64_t seed = 1) {
    double m = 0;
    std::exponential_distribution<double> ex(1.0);
    for (std::size_t i = 0; i < T.simplices.size(); ++i) {
        const auto& s = T.simplices[i];
        double w = weight(s.c, T.p);
        if (w == 0) continue;
        if (T.k == 0) {
            if ((s.v[0] - c).norm() < r) m += w;
        } else if (T.k == 1) {
            m += w * segment_ball_length(s.v[0], s.v[1], c, r);
        } else {
            std::mt19937_64 rng(mix_seed(seed, i));
            int hit = 0;
            for (int n = 0; n < samples; ++n) {
                std::vector<double> l(T.k + 1);
                double tot = 0;
                for (auto& li : l) tot += (li = ex(rng));
                Vec x = Vec::Zero(c.size());
                for (int j = 0; j <= T.k; ++j) x += (l[j] / tot) * s.v[j];
                if ((x - c).norm() < r) ++hit;
            }
            m += w * flat_volume(s.v) * hit / samples;
        }
    }
    return m;
}

struct MassProfile {
    std::vector<std::pair<double, double>> samples;  // (r, chi(r))
};

/// chi(r) = sup over chains and centers of the mass inside B(center, r).
/// Default centers: every vertex and every simplex barycenter of every chain.
inline MassProfile mass_concentration_profile(const std::vector<SimplicialChain>& family,
                                              const std::vector<double>& radii,
                                              std::optional<std::vector<Vec>> centers = std::nullopt) {
    if (family.empty()) throw DomainError("empty family");
    for (auto& T : family)
        if (T.ambient != family.front().ambient) throw DomainError("family members need a common ambient");
    std::vector<Vec> cs;
    if (centers) {
        cs = *centers;
    } else {
        for (auto& T : family)
            for (auto& s : T.simplices) {
                Vec b = Vec::Zero(s.v[0].size());
                for (auto& v : s.v) {
                    cs.push_back(v);
                    b += v;
                }
                cs.push_back(b / static_cast<double>(s.v.size()));
            }
    }
    MassProfile prof;
    std::vector<double> rs = radii;
    std::sort(rs.begin(), rs.end());
    for (double r : rs) {
        double best = 0;
        for (auto& T : family)
            for (auto& c : cs) best = std::max(best, r <= 0 ? 0.0 : mass_in_ball(T, c, r));
        prof.samples.push_back({r, best});
    }
    return prof;
}

}  // namespace modp
