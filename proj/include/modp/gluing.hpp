#pragma once

#include "modp/chains.hpp"
#include "modp/cyclic_fourier.hpp"

#include <map>
#include <set>

namespace modp {

/// z -> A z + b.
struct AffineMap {
    Mat A;
    Vec b;

    static AffineMap identity(int m) { return {Mat::Identity(m, m), Vec::Zero(m)}; }
    Vec operator()(const Vec& z) const { return A * z + b; }
    /// (this o o)(z) = this(o(z))
    AffineMap after(const AffineMap& o) const { return {A * o.A, A * o.b + b}; }
    AffineMap inverse() const {
        Mat Ai = A.inverse();
        return {Ai, -Ai * b};
    }
    double distance(const AffineMap& o) const {
        return std::max((A - o.A).cwiseAbs().maxCoeff(), (b - o.b).cwiseAbs().maxCoeff());
    }
};

enum class MotionKind { Rotation, Translation, Dilation };

inline std::string to_string(MotionKind k) {
    switch (k) {
        case MotionKind::Rotation: return "rotation";
        case MotionKind::Translation: return "translation";
        case MotionKind::Dilation: return "dilation";
    }
    return "?";
}

/// One-parameter affine motion: rotation by rate*x in the (i, j) plane, translation by
/// x*direction, or dilation by exp(rate*x).
struct Motion {
    MotionKind kind = MotionKind::Rotation;
    int i = 0, j = 1;
    double rate = 1.0;
    Vec direction;

    AffineMap at(double x, int m) const {
        AffineMap g = AffineMap::identity(m);
        switch (kind) {
            case MotionKind::Rotation: {
                double a = rate * x;
                g.A(i, i) = std::cos(a);
                g.A(i, j) = -std::sin(a);
                g.A(j, i) = std::sin(a);
                g.A(j, j) = std::cos(a);
                break;
            }
            case MotionKind::Translation: g.b = x * direction; break;
            case MotionKind::Dilation: g.A *= std::exp(rate * x); break;
        }
        return g;
    }
};

/// Chain in the periodic 1-dimensional base: parameter arcs [a, b] and points.
struct BaseChain {
    int p = 2;
    std::vector<std::tuple<double, double, int>> arcs;  // (a, b, c), a < b
    std::vector<std::pair<double, int>> points;         // (x, c)

    double mass() const {
        double m = 0;
        for (auto& [a, b, c] : arcs) m += weight(c, p) * (b - a);
        for (auto& [x, c] : points) m += weight(c, p);
        return m;
    }

    BaseChain boundary() const {
        BaseChain d;
        d.p = p;
        for (auto& [a, b, c] : arcs) {
            d.points.push_back({b, c});
            d.points.push_back({a, residue(-c, p)});
        }
        return d;
    }
};

/// Piecewise smooth family over a circle of length `period` cut into `cells` equal arcs:
/// f(x) = G(x)_# Z_0 with G a composition of affine motions. Cell and vertex charts are
/// phi_c(x, .) = G(x) G(x_c)^{-1} with model chain Z_c = f(x_c), x_c the barycenter
/// (or the vertex). Collapse maps are phi_{tau sigma} = phi_tau^{-1} o phi_sigma on tau.
struct CubicalFamily {
    std::string name;
    int p = 2;
    Ambient ambient = Ambient::euclidean(0);
    double period = 2 * M_PI;
    int cells = 8;
    std::vector<Motion> motions;
    SimplicialChain model;  // Z_0 = f(0)

    int m() const { return ambient.coord_dim(); }
    int fiber_dim() const { return model.k; }
    double cell_width() const { return period / cells; }
    double vertex(int j) const { return cell_width() * j; }
    double barycenter(int j) const { return cell_width() * (j + 0.5); }

    AffineMap G(double x) const {
        AffineMap g = AffineMap::identity(m());
        for (auto& mo : motions) g = mo.at(x, m()).after(g);
        return g;
    }

    Mat dG_apply(double x, const Vec& z, double h = 1e-6) const { return (G(x + h)(z) - G(x - h)(z)) / (2 * h); }

    static SimplicialChain push(const AffineMap& g, const SimplicialChain& Z) {
        SimplicialChain out(Z.p, Z.ambient, Z.k, Z.relative);
        for (auto& s : Z.simplices) {
            std::vector<Vec> v;
            for (auto& x : s.v) v.push_back(g(x));
            out.simplices.push_back({std::move(v), s.c});
        }
        return out.canonicalize();
    }

    SimplicialChain value(double x) const { return push(G(x), model); }

    AffineMap chart(double x_cell, double x) const { return G(x).after(G(x_cell).inverse()); }

    SimplicialChain cell_model(int j) const { return value(barycenter(j)); }
    SimplicialChain vertex_model(int j) const { return value(vertex(j)); }
};

struct Transversality {
    bool transversal = true;
    double min_distance = 0;
    std::vector<double> perturbation;  // applied to each endpoint, in order
};

inline Transversality check_transversal(const CubicalFamily& fam, const BaseChain& T, double tol_t = 1e-9) {
    Transversality t;
    t.min_distance = std::numeric_limits<double>::infinity();
    auto d = [&](double x) {
        double h = fam.cell_width();
        double r = std::fmod(std::fmod(x, h) + h, h);
        return std::min(r, h - r);
    };
    for (auto& [a, b, c] : T.arcs) t.min_distance = std::min({t.min_distance, d(a), d(b)});
    for (auto& [x, c] : T.points) t.min_distance = std::min(t.min_distance, d(x));
    t.transversal = t.min_distance > tol_t * fam.period;
    return t;
}

/// Random perturbation of every endpoint by at most `magnitude`, recorded.
inline BaseChain perturb(const BaseChain& T, std::uint64_t seed, double magnitude, Transversality* rec) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-magnitude, magnitude);
    BaseChain out = T;
    auto bump = [&](double& x) {
        double e = U(rng);
        x += e;
        if (rec) rec->perturbation.push_back(e);
    };
    for (auto& [a, b, c] : out.arcs) {
        bump(a);
        bump(b);
    }
    for (auto& [x, c] : out.points) bump(x);
    return out;
}

struct GluingResult {
    SimplicialChain chain;
    double mass_in = 0;
    double mass_out = 0;
    double C = 0;  // max over cells of Lip^{1+k} M(Z_cell)
    Transversality transversality;
};

/// Lipschitz constant of (x, z) -> phi_cell(x, z) over the cell, from the operator norm of
/// [d_x phi | A] at the model vertices and a few parameter samples.
inline double chart_lipschitz(const CubicalFamily& fam, int j, int samples = 5) {
    double L = 0;
    double xc = fam.barycenter(j);
    SimplicialChain Z = fam.cell_model(j);
    for (int q = 0; q < samples; ++q) {
        double x = fam.vertex(j) + fam.cell_width() * q / (samples - 1);
        AffineMap ph = fam.chart(xc, x);
        AffineMap inv = fam.G(xc).inverse();
        for (auto& s : Z.simplices)
            for (auto& z : s.v) {
                Mat M(fam.m(), fam.m() + 1);
                M.col(0) = fam.dG_apply(x, inv(z));
                M.rightCols(fam.m()) = ph.A;
                Eigen::JacobiSVD<Mat> svd(M);
                L = std::max(L, svd.singularValues()[0]);
            }
    }
    return L;
}

inline double gluing_constant(const CubicalFamily& fam) {
    double C = 0;
    for (int j = 0; j < fam.cells; ++j) {
        SimplicialChain Z = fam.cell_model(j);
        double mz = Z.simplices.empty() ? 0.0 : Z.mass();
        C = std::max(C, std::pow(chart_lipschitz(fam, j), 1 + fam.fiber_dim()) * mz);
    }
    return C;
}

namespace detail {
/// Unrolled cell index and local parameter for a base parameter x.
inline std::pair<int, double> locate(const CubicalFamily& fam, double x, long J) {
    long q = static_cast<long>(std::floor(static_cast<double>(J) / fam.cells));
    int j = static_cast<int>(J - q * fam.cells);
    return {j, x - q * fam.period};
}
}  // namespace detail

/// Phi(T) = sum over top cells of phi_sigma_#((T restricted to sigma) x Z_sigma), with each
/// prism [a, b] x simplex triangulated by the staircase and mapped vertexwise.
inline GluingResult standard_gluing(const CubicalFamily& fam, const BaseChain& T, bool allow_perturbation = false,
                                    std::uint64_t seed = 1) {
    GluingResult r;
    r.transversality = check_transversal(fam, T);
    BaseChain Tt = T;
    if (!r.transversality.transversal) {
        if (!allow_perturbation)
            throw DomainError("chain is not transversal to the cells; rerun with perturbation enabled");
        Transversality rec;
        Tt = perturb(T, seed, 1e-7, &rec);
        r.transversality = check_transversal(fam, Tt);
        r.transversality.perturbation = rec.perturbation;
        if (!r.transversality.transversal) throw DomainError("perturbation did not reach general position");
    }
    r.mass_in = Tt.mass();
    r.C = gluing_constant(fam);
    int k = fam.fiber_dim();
    r.chain = SimplicialChain(fam.p, fam.ambient, k + (Tt.arcs.empty() ? 0 : 1), fam.model.relative);
    if (!Tt.arcs.empty() && !Tt.points.empty()) throw DomainError("mixed-dimension base chain");
    const double h = fam.cell_width();
    for (auto& [x, c] : Tt.points) {
        long J = static_cast<long>(std::floor(x / h));
        auto [j, xl] = detail::locate(fam, x, J);
        SimplicialChain img = CubicalFamily::push(fam.chart(fam.barycenter(j), xl), fam.cell_model(j));
        for (auto& s : img.simplices) r.chain.simplices.push_back({s.v, residue(static_cast<long long>(s.c) * c, fam.p)});
    }
    auto cells = staircase(1, k);
    for (auto& [a, b, c] : Tt.arcs) {
        long J0 = static_cast<long>(std::floor(a / h)), J1 = static_cast<long>(std::floor(b / h));
        for (long J = J0; J <= J1; ++J) {
            double u = std::max(a, J * h), v = std::min(b, (J + 1) * h);
            if (v <= u) continue;
            auto [j, ul] = detail::locate(fam, u, J);
            double vl = ul + (v - u);
            double xc = fam.barycenter(j);
            AffineMap inv = fam.G(xc).inverse();
            SimplicialChain Z = fam.cell_model(j);
            for (auto& s : Z.simplices) {
                long long coeff = static_cast<long long>(s.c) * c;
                if (residue(coeff, fam.p) == 0) continue;
                for (auto& [path, sign] : cells) {
                    std::vector<Vec> verts;
                    for (auto [pi, zi] : path) {
                        double x = pi == 0 ? ul : vl;
                        verts.push_back(fam.G(x)(inv(s.v[zi])));
                    }
                    Simplex sx{std::move(verts), residue(coeff * sign, fam.p)};
                    // a fixed point of the motion sweeps to a degenerate prism simplex, which is zero
                    if (r.chain.volume(sx) <= tol().vol) continue;
                    r.chain.simplices.push_back(std::move(sx));
                }
            }
        }
    }
    r.chain.canonicalize();
    r.mass_out = r.chain.simplices.empty() ? 0.0 : r.chain.mass();
    return r;
}

struct ChainMapCheck {
    bool ok = false;
    double max_vertex_error = 0;
};

/// Compare two chains whose simplices correspond after canonical ordering.
inline ChainMapCheck compare_chains(const SimplicialChain& A, const SimplicialChain& B, double tau = 1e-6) {
    ChainMapCheck r;
    SimplicialChain a = A.canonical(), b = B.canonical();
    if (a.simplices.size() != b.simplices.size()) {
        r.max_vertex_error = std::numeric_limits<double>::infinity();
        return r;
    }
    auto key = [](const Simplex& s) {
        Vec c = Vec::Zero(s.v[0].size());
        for (auto& v : s.v) c += v;
        return c;
    };
    std::vector<bool> used(b.simplices.size(), false);
    for (auto& s : a.simplices) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t q = 0; q < b.simplices.size(); ++q) {
            if (used[q] || b.simplices[q].c != s.c) continue;
            double d = (key(s) - key(b.simplices[q])).norm();
            if (d < best) {
                best = d;
                arg = q;
            }
        }
        if (!std::isfinite(best)) {
            r.max_vertex_error = best;
            return r;
        }
        used[arg] = true;
        double e = 0;
        const auto& t = b.simplices[arg];
        for (std::size_t i = 0; i < s.v.size(); ++i) e = std::max(e, (s.v[i] - t.v[i]).norm());
        r.max_vertex_error = std::max(r.max_vertex_error, e);
    }
    r.ok = r.max_vertex_error <= tau;
    return r;
}

/// dPhi(T) against Phi(dT).
inline ChainMapCheck check_chain_map(const CubicalFamily& fam, const BaseChain& T, double tau = 1e-6) {
    GluingResult g = standard_gluing(fam, T);
    BaseChain dT = T.boundary();
    GluingResult gd = standard_gluing(fam, dT);
    SimplicialChain lhs = g.chain.k >= 1 ? boundary(g.chain) : g.chain;
    if (lhs.is_zero() && gd.chain.is_zero()) return {true, 0};
    return compare_chains(lhs, gd.chain, tau);
}

struct FamilyInvariants {
    double chart_identity = 0;    // |phi_sigma(x, .)_# Z_sigma - f(x)| on vertices
    double collapse_identity = 0;  // |phi_sigma - phi_tau o phi_{tau sigma}| on tau
    double collapse_model = 0;     // phi_{tau sigma #} Z_sigma against Z_tau (vertex error)
    double cocycle = 0;
    bool ok = false;
};

inline FamilyInvariants check_family(const CubicalFamily& fam, int samples, std::uint64_t seed) {
    FamilyInvariants inv;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int s = 0; s < samples; ++s) {
        int j = static_cast<int>(U(rng) * fam.cells) % fam.cells;
        double x = fam.vertex(j) + U(rng) * fam.cell_width();
        SimplicialChain a = CubicalFamily::push(fam.chart(fam.barycenter(j), x), fam.cell_model(j));
        auto cmp = compare_chains(a, fam.value(x), 1.0);
        inv.chart_identity = std::max(inv.chart_identity, cmp.max_vertex_error);
        for (int side = 0; side < 2; ++side) {
            double xt = fam.vertex(j + side);
            int vt = (j + side) % fam.cells;
            AffineMap phi_s = fam.chart(fam.barycenter(j), xt);
            AffineMap phi_t = fam.chart(fam.vertex(vt), fam.vertex(vt));
            AffineMap collapse = phi_t.inverse().after(phi_s);
            inv.collapse_identity = std::max(inv.collapse_identity, phi_s.distance(phi_t.after(collapse)));
            auto cm = compare_chains(CubicalFamily::push(collapse, fam.cell_model(j)), fam.vertex_model(vt), 1.0);
            inv.collapse_model = std::max(inv.collapse_model, cm.max_vertex_error);
        }
    }
    // a 1-dimensional base has no chains kappa < tau < sigma of distinct cells
    inv.cocycle = 0;
    inv.ok = inv.chart_identity <= 1e-9 && inv.collapse_identity <= 1e-9 && inv.collapse_model <= 1e-6;
    return inv;
}

/// S^1 x S^1 in R^4 fibred over the first circle; the fibre is a regular polygon.
inline CubicalFamily torus_family(int cells = 8, int fibre_vertices = 12, int p = 2) {
    CubicalFamily f;
    f.name = "torus";
    f.p = p;
    f.ambient = Ambient::euclidean(4);
    f.period = 2 * M_PI;
    f.cells = cells;
    f.motions = {Motion{MotionKind::Rotation, 0, 1, 1.0, {}}};
    f.model = SimplicialChain(p, f.ambient, 1);
    for (int q = 0; q < fibre_vertices; ++q) {
        Vec a(4), b(4);
        double t0 = 2 * M_PI * q / fibre_vertices, t1 = 2 * M_PI * (q + 1) / fibre_vertices;
        a << 1, 0, std::cos(t0), std::sin(t0);
        b << 1, 0, std::cos(t1), std::sin(t1);
        f.model.add({a, b}, 1);
    }
    f.model.canonicalize();
    return f;
}

/// Lines through the origin of R^2 (RP^1, angle in [0, pi)) sent to l^perp cap D^2, mod 2.
inline CubicalFamily rp1_family(int cells = 8, int pieces = 4) {
    CubicalFamily f;
    f.name = "rp1";
    f.p = 2;
    f.ambient = Ambient::disk(2);
    f.period = M_PI;
    f.cells = cells;
    f.motions = {Motion{MotionKind::Rotation, 0, 1, 1.0, {}}};
    f.model = SimplicialChain(2, f.ambient, 1, true);
    for (int q = 0; q < pieces; ++q) {
        Vec a(2), b(2);
        a << 0, -1 + 2.0 * q / pieces;
        b << 0, -1 + 2.0 * (q + 1) / pieces;
        f.model.add({a, b}, 1);
    }
    f.model.canonicalize();
    return f;
}

/// Upper bound for Fl(f(x), f(y)) from the swept filling Phi([x, y]).
struct LipschitzProbe {
    double distance = 0;
    double flat_upper = 0;
    double bound = 0;  // C * d(x, y)
};

inline LipschitzProbe lipschitz_probe(const CubicalFamily& fam, double x, double y) {
    LipschitzProbe pr;
    BaseChain seg;
    seg.p = fam.p;
    seg.arcs.push_back({std::min(x, y), std::max(x, y), 1});
    auto g = standard_gluing(fam, seg, true);
    pr.distance = std::abs(y - x);
    pr.flat_upper = g.mass_out;
    pr.bound = g.C * pr.distance;
    return pr;
}

// ---------------------------------------------------------------------------
// RP^n family over the boundary of the cube [-1, 1]^{n+1} modulo +-1

/// Rotation taking unit a to unit b in the plane they span (identity when equal).
inline Mat minimal_rotation(const Vec& a, const Vec& b) {
    int m = static_cast<int>(a.size());
    double c = std::clamp(a.dot(b), -1.0, 1.0);
    Vec w = b - c * a;
    if (w.norm() < 1e-15) {
        if (c > 0) return Mat::Identity(m, m);
        throw DomainError("antipodal transport is ambiguous");
    }
    w.normalize();
    double s = std::sqrt(std::max(0.0, 1 - c * c));
    Mat R = Mat::Identity(m, m) + s * (w * a.transpose() - a * w.transpose()) +
            (c - 1) * (a * a.transpose() + w * w.transpose());
    return R;
}

/// A face of the cube: coordinates in `fixed` pinned to +-1, the rest free in [-1, 1].
struct CubeFace {
    std::map<int, int> fixed;  // coordinate -> sign
    Vec barycenter(int m) const {
        Vec b = Vec::Zero(m);
        for (auto [i, s] : fixed) b[i] = s;
        return b;
    }
    bool contains(const CubeFace& o) const {
        for (auto [i, s] : fixed) {
            auto it = o.fixed.find(i);
            if (it == o.fixed.end() || it->second != s) return false;
        }
        return true;
    }
};

struct RpnFamily {
    int n = 1;
    SimplicialChain model;  // triangulated (0 x R^n) cap D^{n+1}

    int m() const { return n + 1; }

    /// Chart of a face at x: transport from the face barycenter then from e_0.
    Mat chart(const CubeFace& f, const Vec& x) const {
        Vec b = f.barycenter(m()).normalized();
        Vec e0 = Vec::Unit(m(), 0);
        return minimal_rotation(b, x.normalized()) * minimal_rotation(e0, b);
    }
};

/// Cross-polytope triangulation of the unit ball of R^n, embedded as 0 x R^n.
inline SimplicialChain ball_model(int n) {
    SimplicialChain Z(2, Ambient::disk(n + 1), n, true);
    Vec o = Vec::Zero(n + 1);
    if (n == 1) {
        Vec a = Vec::Zero(2), b = Vec::Zero(2);
        a[1] = -1;
        b[1] = 1;
        Z.add({a, o}, 1);
        Z.add({o, b}, 1);
        return Z.canonicalize();
    }
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<Vec> v{o};
        for (int i = 0; i < n; ++i) {
            Vec e = Vec::Zero(n + 1);
            e[i + 1] = (mask >> i & 1) ? -1 : 1;
            v.push_back(e);
        }
        Z.add(v, 1);
    }
    return Z.canonicalize();
}

inline RpnFamily rpn_family(int n) {
    if (n < 1 || n > 3) throw DomainError("rpn_family supports n in {1, 2, 3}");
    RpnFamily f;
    f.n = n;
    f.model = ball_model(n);
    return f;
}

/// Chart identity, collapse identity and cocycle residuals at sampled points of faces
/// kappa < tau < sigma of the top cells {x_i = 1}.
inline FamilyInvariants check_family(const RpnFamily& fam, int samples, std::uint64_t seed) {
    FamilyInvariants inv;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::uniform_int_distribution<int> coord(0, fam.n);
    const int m = fam.m();
    Vec e0 = Vec::Unit(m, 0);
    for (int s = 0; s < samples; ++s) {
        int i = coord(rng);
        CubeFace sigma{{{i, 1}}};
        int j = (i + 1 + coord(rng) % fam.n) % m;
        CubeFace tau = sigma;
        tau.fixed[j] = U(rng) < 0 ? -1 : 1;
        CubeFace kappa = tau;
        if (fam.n >= 2) {
            int q = j;
            while (kappa.fixed.count(q)) q = (q + 1) % m;
            kappa.fixed[q] = U(rng) < 0 ? -1 : 1;
        }
        Vec x(m);
        for (int c = 0; c < m; ++c) x[c] = U(rng);
        for (auto [c, sg] : kappa.fixed) x[c] = sg;
        Mat Ps = fam.chart(sigma, x), Pt = fam.chart(tau, x), Pk = fam.chart(kappa, x);
        // chart image lies in l^perp cap D
        for (auto& sp : fam.model.simplices)
            for (auto& z : sp.v) {
                Vec y = Ps * z;
                inv.chart_identity = std::max(inv.chart_identity, std::abs(y.dot(x.normalized())));
                inv.chart_identity = std::max(inv.chart_identity, std::max(0.0, y.norm() - 1));
            }
        Mat cts = Pt.transpose() * Ps;
        Mat ckt = Pk.transpose() * Pt;
        Mat cks = Pk.transpose() * Ps;
        inv.collapse_identity = std::max(inv.collapse_identity, (Ps - Pt * cts).cwiseAbs().maxCoeff());
        inv.collapse_model = std::max(inv.collapse_model, (cts * e0 - e0).norm());
        inv.cocycle = std::max(inv.cocycle, (cks - ckt * cts).cwiseAbs().maxCoeff());
    }
    inv.ok = inv.chart_identity <= 1e-9 && inv.collapse_identity <= 1e-9 && inv.collapse_model <= 1e-9 &&
             inv.cocycle <= 1e-9;
    return inv;
}

// ---------------------------------------------------------------------------
// localization toolkit

/// Metric ball, or the collar thickening of a boundary ball when `boundary` is set.
struct GeneralizedBall {
    Vec center;
    double r = 0;
    bool boundary = false;

    GeneralizedBall scaled(double f) const { return {center, r * f, boundary}; }
    bool contains(const GeneralizedBall& o, double eps = 1e-12) const {
        return (center - o.center).norm() + o.r <= r + eps;
    }
    bool touches(const GeneralizedBall& o) const { return (center - o.center).norm() <= r + o.r; }
};

inline GeneralizedBall enclosing_ball(const GeneralizedBall& a, const GeneralizedBall& b) {
    if (a.contains(b, 0)) return a;
    if (b.contains(a, 0)) return b;
    double d = (b.center - a.center).norm();
    double R = 0.5 * (d + a.r + b.r);
    Vec c = a.center + (R - a.r) / d * (b.center - a.center);
    return {c, R, a.boundary || b.boundary};
}

struct CellBalls {
    int dim = 0;
    std::vector<int> faces;  // codimension-1 faces (indices into the cell list)
    std::vector<GeneralizedBall> balls;
};

struct DoublingResult {
    std::vector<std::vector<GeneralizedBall>> V;
    double radius_sum_ratio = 0;  // max over cells of sum of radii of V_C / delta
    int max_count = 0;
    int max_pool = 0;           // largest #W_C fed to the merging loop
    bool growth_bound = true;   // sum r(V_C) <= 2^(#W_C - 1) sum r(W_C) in every cell
    bool disjoint_doubles = true;
    bool nested = true;
    bool contains_inputs = true;
};

namespace detail {
inline std::set<int> face_closure(const std::vector<CellBalls>& cells, int c) {
    std::set<int> out;
    std::vector<int> stack = cells[c].faces;
    while (!stack.empty()) {
        int f = stack.back();
        stack.pop_back();
        if (!out.insert(f).second) continue;
        for (int g : cells[f].faces) stack.push_back(g);
    }
    return out;
}
}  // namespace detail

inline void verify_doubling(const std::vector<CellBalls>& cells, DoublingResult& r) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& V = r.V[c];
        for (std::size_t a = 0; a < V.size(); ++a)
            for (std::size_t b = a + 1; b < V.size(); ++b)
                if ((V[a].center - V[b].center).norm() <= 2 * (V[a].r + V[b].r)) r.disjoint_doubles = false;
        for (int f : detail::face_closure(cells, static_cast<int>(c)))
            for (auto& B : r.V[f]) {
                bool found = false;
                for (auto& U : V) found = found || U.contains(B.scaled(2), 1e-9);
                if (!found) r.nested = false;
            }
        for (auto& U : cells[c].balls) {
            bool found = false;
            for (auto& W : V) found = found || W.contains(U, 1e-9);
            if (!found) r.contains_inputs = false;
        }
    }
}

/// Grow, double, merge touching balls into twice their enclosing ball, repeat, halve;
/// cells are processed by increasing dimension.
inline DoublingResult doubling_merge(const std::vector<CellBalls>& cells, double delta, double collar_radius) {
    DoublingResult r;
    r.V.assign(cells.size(), {});
    std::vector<int> order(cells.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return cells[a].dim < cells[b].dim; });
    for (int c : order) {
        for (auto& f : cells[c].faces)
            if (cells[f].dim >= cells[c].dim) throw DomainError("faces must have lower dimension");
        std::vector<GeneralizedBall> W = cells[c].balls;
        for (auto& B : W)
            if (B.boundary && B.r >= collar_radius)
                throw DomainError("boundary ball radius exceeds the collar radius");
        for (int f : cells[c].faces)
            for (auto& B : r.V[f]) W.push_back(B.scaled(2));
        double pool_sum = 0;
        for (auto& B : W) pool_sum += B.r;
        const int pool = static_cast<int>(W.size());
        r.max_pool = std::max(r.max_pool, pool);
        for (auto& B : W) B = B.scaled(2);
        bool merged = true;
        while (merged) {
            merged = false;
            for (std::size_t a = 0; a < W.size() && !merged; ++a)
                for (std::size_t b = a + 1; b < W.size() && !merged; ++b)
                    if (W[a].touches(W[b])) {
                        GeneralizedBall e = enclosing_ball(W[a], W[b]).scaled(2);
                        W.erase(W.begin() + static_cast<long>(b));
                        W[a] = e;
                        merged = true;
                    }
        }
        for (auto& B : W) B = B.scaled(0.5);
        double rs = 0;
        for (auto& B : W) rs += B.r;
        if (delta > 0) r.radius_sum_ratio = std::max(r.radius_sum_ratio, rs / delta);
        if (pool > 0 && rs > std::ldexp(pool_sum, pool - 1) * (1 + 1e-12)) r.growth_bound = false;
        r.max_count = std::max(r.max_count, static_cast<int>(W.size()));
        r.V[c] = std::move(W);
    }
    verify_doubling(cells, r);
    return r;
}

// ---------------------------------------------------------------------------
// coarea radius selection for 1-chains

/// Number of points (with weights) where T meets the sphere of radius t about c.
inline double slice_mass(const SimplicialChain& T, const Vec& c, double t) {
    if (T.k != 1) throw DomainError("slice mass implemented for 1-chains");
    double m = 0;
    for (auto& s : T.simplices) {
        Vec a = s.v[0], d = s.v[1] - s.v[0];
        double A = d.squaredNorm(), B = 2 * (a - c).dot(d), C = (a - c).squaredNorm() - t * t;
        double disc = B * B - 4 * A * C;
        if (disc < 0) continue;
        double sq = std::sqrt(disc);
        int hits = 0;
        for (double u : {(-B - sq) / (2 * A), (-B + sq) / (2 * A)})
            if (u >= 0 && u <= 1) ++hits;
        if (disc == 0 && hits == 2) hits = 1;
        m += weight(s.c, T.p) * hits;
    }
    return m;
}

/// Mass of T in the closed shell t0 <= |x - c| <= t1.
inline double shell_mass(const SimplicialChain& T, const Vec& c, double t0, double t1) {
    double m = 0;
    for (auto& s : T.simplices) {
        double w = weight(s.c, T.p);
        m += w * (segment_ball_length(s.v[0], s.v[1], c, t1) - segment_ball_length(s.v[0], s.v[1], c, std::max(t0, 0.0)));
    }
    return m;
}

/// Radii at which slice_mass can change: vertex distances and closest-point distances.
inline std::vector<double> slice_breakpoints(const SimplicialChain& T, const Vec& c) {
    std::vector<double> out;
    for (auto& s : T.simplices) {
        for (auto& v : s.v) out.push_back((v - c).norm());
        Vec d = s.v[1] - s.v[0];
        double u = std::clamp((c - s.v[0]).dot(d) / d.squaredNorm(), 0.0, 1.0);
        out.push_back((s.v[0] + u * d - c).norm());
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct CoareaCertificate {
    double slice = 0, slice_bound = 0;   // M(tau_j restricted to dB_lambda) <= (2k^2/s) M(tau_j)
    double shell = 0, shell_bound = 0;   // M(tau_j restricted to the s lambda/4 collar) <= lambda k M(tau_j)
    bool holds() const { return slice <= slice_bound * (1 + 1e-12) + 1e-15 && shell <= shell_bound * (1 + 1e-12) + 1e-15; }
};

struct CoareaResult {
    GeneralizedBall ball;
    int annulus = 0;  // pigeonhole annulus index l (1-based), 0 when the scan path was used
    std::string path;  // "pigeonhole" or "scan"
    std::vector<CoareaCertificate> certificates;
    bool ok = false;
    double min_slack = 0;
};

/// Choose r_lambda in [r, r + s] following the pigeonhole argument over L = ceil(1/lambda)
/// annuli; certificates are recomputed exactly. When the collar of half-width s lambda/4
/// leaves the chosen annulus (1/lambda not an integer) and a certificate fails, every
/// interval between slice breakpoints in [r, r + s] is scanned instead.
inline CoareaResult coarea_select_radius(const std::vector<SimplicialChain>& taus, const GeneralizedBall& B,
                                         double s, double lambda) {
    if (!(s > 0 && s <= B.r)) throw DomainError("need 0 < s <= r");
    if (!(lambda > 0 && lambda < 1)) throw DomainError("need 0 < lambda < 1");
    const double k = static_cast<double>(taus.size());
    const Vec& c = B.center;
    std::vector<double> mass;
    for (auto& t : taus) {
        if (t.k != 1 && !t.simplices.empty()) throw DomainError("coarea selection implemented for 1-chains");
        mass.push_back(t.simplices.empty() ? 0.0 : t.mass());
    }
    auto certify = [&](double rl) {
        std::vector<CoareaCertificate> cs;
        double w = s * lambda / 4;
        for (std::size_t j = 0; j < taus.size(); ++j) {
            CoareaCertificate ct;
            if (mass[j] > 0) {
                ct.slice = slice_mass(taus[j], c, rl);
                ct.shell = shell_mass(taus[j], c, rl - w, rl + w);
            }
            ct.slice_bound = 2 * k * k / s * mass[j];
            ct.shell_bound = lambda * k * mass[j];
            cs.push_back(ct);
        }
        return cs;
    };
    auto all_hold = [](const std::vector<CoareaCertificate>& cs) {
        return std::all_of(cs.begin(), cs.end(), [](const CoareaCertificate& c) { return c.holds(); });
    };
    auto normalized = [&](double rl) {
        double v = 0;
        for (std::size_t j = 0; j < taus.size(); ++j)
            if (mass[j] > 0) v += slice_mass(taus[j], c, rl) / mass[j];
        return v;
    };
    std::vector<double> bps;
    for (auto& t : taus)
        if (!t.simplices.empty())
            for (double b : slice_breakpoints(t, c)) bps.push_back(b);
    std::sort(bps.begin(), bps.end());
    // best radius inside (lo, hi): midpoints between consecutive breakpoints
    auto best_in = [&](double lo, double hi) {
        std::vector<double> pts{lo};
        for (double b : bps)
            if (b > lo && b < hi) pts.push_back(b);
        pts.push_back(hi);
        double best = std::numeric_limits<double>::infinity(), arg = 0.5 * (lo + hi);
        for (std::size_t q = 0; q + 1 < pts.size(); ++q) {
            if (pts[q + 1] <= pts[q]) continue;
            double mid = 0.5 * (pts[q] + pts[q + 1]);
            double v = normalized(mid);
            if (v < best) {
                best = v;
                arg = mid;
            }
        }
        return arg;
    };
    CoareaResult res;
    const int L = static_cast<int>(std::ceil(1 / lambda - 1e-12));
    int lbest = 1;
    double vbest = std::numeric_limits<double>::infinity();
    for (int l = 1; l <= L; ++l) {
        double v = 0;
        double t0 = B.r + (l - 1) * s / L, t1 = B.r + l * s / L;
        for (std::size_t j = 0; j < taus.size(); ++j)
            if (mass[j] > 0) v += shell_mass(taus[j], c, t0, t1) / mass[j];
        if (v < vbest) {
            vbest = v;
            lbest = l;
        }
    }
    double rl = best_in(B.r + (lbest - 0.75) * s / L, B.r + (lbest - 0.25) * s / L);
    auto cs = certify(rl);
    res.path = "pigeonhole";
    res.annulus = lbest;
    if (!all_hold(cs)) {
        res.path = "scan";
        res.annulus = 0;
        std::vector<double> pts{B.r};
        for (double b : bps)
            if (b > B.r && b < B.r + s) pts.push_back(b);
        pts.push_back(B.r + s);
        for (std::size_t q = 0; q + 1 < pts.size(); ++q) {
            if (pts[q + 1] <= pts[q]) continue;
            double mid = 0.5 * (pts[q] + pts[q + 1]);
            auto c2 = certify(mid);
            if (all_hold(c2)) {
                rl = mid;
                cs = c2;
                break;
            }
        }
    }
    res.ball = {c, rl, B.boundary};
    res.certificates = cs;
    res.ok = all_hold(cs);
    res.min_slack = std::numeric_limits<double>::infinity();
    for (auto& ct : cs)
        res.min_slack = std::min({res.min_slack, ct.slice_bound - ct.slice, ct.shell_bound - ct.shell});
    return res;
}

}  // namespace modp
