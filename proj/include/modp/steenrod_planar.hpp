#pragma once

#include "modp/core.hpp"

#include <optional>

namespace modp {

/// Affine subspace offset + span(basis) of R^d. Canonical form: orthonormal columns and
/// offset orthogonal to the span.
struct Subspace {
    int d = 0;
    Mat basis;   // d x r
    Vec offset;  // d

    int dim() const { return static_cast<int>(basis.cols()); }
    bool linear() const { return offset.norm() <= 1e-12; }

    Mat projector() const { return basis * basis.transpose(); }

    /// Distance from x to the affine subspace.
    double distance(const Vec& x) const {
        Vec y = x - offset;
        return (y - basis * (basis.transpose() * y)).norm();
    }

    static Subspace make(const Mat& spanning, const Vec& offset) {
        Subspace s;
        s.d = static_cast<int>(offset.size());
        if (spanning.cols() == 0) {
            s.basis = Mat::Zero(s.d, 0);
        } else {
            Eigen::JacobiSVD<Mat> svd(spanning, Eigen::ComputeThinU);
            int r = 0;
            double top = svd.singularValues()[0];
            for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
                if (svd.singularValues()[i] > 1e-12 * std::max(1.0, top)) ++r;
            s.basis = svd.matrixU().leftCols(r);
        }
        s.offset = offset - s.basis * (s.basis.transpose() * offset);
        return s;
    }

    static Subspace linear_span(const Mat& spanning) {
        return make(spanning, Vec::Zero(spanning.rows()));
    }
};

inline Subspace orth_complement(const Subspace& S) {
    if (!S.linear()) throw DomainError("orthogonal complement needs a linear subspace");
    Mat P = Mat::Identity(S.d, S.d) - S.projector();
    return Subspace::linear_span(P);
}

inline Subspace subspace_sum(const Subspace& A, const Subspace& B) {
    Mat M(A.d, A.dim() + B.dim());
    M << A.basis, B.basis;
    return Subspace::linear_span(M);
}

inline Subspace subspace_intersection(const Subspace& A, const Subspace& B) {
    return orth_complement(subspace_sum(orth_complement(A), orth_complement(B)));
}

/// Equal spans and offsets.
inline bool same_subspace(const Subspace& A, const Subspace& B, double eps = 1e-10) {
    if (A.d != B.d || A.dim() != B.dim()) return false;
    if ((A.projector() - B.projector()).cwiseAbs().maxCoeff() > eps) return false;
    return (A.offset - B.offset).norm() <= eps;
}

inline Subspace cartesian(const Subspace& A, const Subspace& B) {
    Subspace s;
    s.d = A.d + B.d;
    s.basis = Mat::Zero(s.d, A.dim() + B.dim());
    s.basis.topLeftCorner(A.d, A.dim()) = A.basis;
    s.basis.bottomRightCorner(B.d, B.dim()) = B.basis;
    s.offset = Vec(s.d);
    s.offset << A.offset, B.offset;
    return s;
}

/// Subspace clipped to the unit disk of its ambient; `vanishes` when the clip is
/// contained in the boundary.
struct DiskClipped {
    Subspace plane;
    double radius = 0;  // radius of the clipped ball inside the plane
    bool vanishes = false;
};

inline DiskClipped clip_to_disk(const Subspace& S) {
    DiskClipped c;
    c.plane = S;
    double o = S.offset.norm();
    c.vanishes = o >= 1.0 - 1e-12;
    c.radius = c.vanishes ? 0.0 : std::sqrt(1 - o * o);
    return c;
}

/// (l^perp)^{k+i-1} x {v}, clipped to D^{(n+1)(k+i)}.
inline DiskClipped g_q(const Vec& ell, const Vec& v, int k, int i) {
    if (k + i < 1) throw DomainError("g_q needs k + i >= 1");
    int m = static_cast<int>(ell.size());
    if (v.size() != m) throw DomainError("v must live in the same R^{n+1} as the line");
    if (v.norm() > 1 + 1e-12) throw DomainError("v outside the disk");
    Subspace perp = orth_complement(Subspace::linear_span(ell));
    Subspace acc;
    acc.d = 0;
    acc.basis = Mat::Zero(0, 0);
    acc.offset = Vec::Zero(0);
    for (int j = 0; j < k + i - 1; ++j) acc = cartesian(acc, perp);
    Subspace point;
    point.d = m;
    point.basis = Mat::Zero(m, 0);
    point.offset = v;
    return clip_to_disk(cartesian(acc, point));
}

struct MemberResult {
    bool member = false;
    Vec ell;
    double residual = 0;
};

struct PlanarSample {
    Vec point;
    Vec ell;
};

/// sq^i(V cap S^n) for a (k+1)-dimensional affine V, p = 2: the union over lines l in V_0
/// of ((l^perp)^{k+i-1} x (l^perp cap V)) cap D^{(n+1)(k+i)}.
struct PlanarSqFamily {
    int n = 0, k = 0, i = 0;
    Subspace V;  // canonical: offset orthogonal to V_0
    bool empty = false;

    int blocks() const { return k + i; }
    int ambient_dim() const { return (n + 1) * (k + i); }
    int component_dim() const { return n * (k + i - 1) + k; }

    /// Linear part W_l of the component, as columns of R^{(n+1)(k+i)}.
    Mat component_basis(const Vec& ell) const {
        Subspace perp = orth_complement(Subspace::linear_span(ell));
        Subspace Vl = subspace_intersection(Subspace::linear_span(V.basis), perp);
        Mat W = Mat::Zero(ambient_dim(), component_dim());
        int col = 0;
        for (int b = 0; b < k + i - 1; ++b) {
            W.block(b * (n + 1), col, n + 1, n) = perp.basis;
            col += n;
        }
        W.block((k + i - 1) * (n + 1), col, n + 1, Vl.dim()) = Vl.basis;
        return W;
    }

    Vec component_offset() const {
        Vec c = Vec::Zero(ambient_dim());
        c.tail(n + 1) = V.offset;
        return c;
    }

    /// Whether q lies on some component; returns the generating line.
    MemberResult member(const Vec& q, double eps = 1e-9) const {
        MemberResult r;
        if (empty || q.size() != ambient_dim()) return r;
        if (q.norm() > 1 + eps) return r;
        Vec last = q.tail(n + 1);
        double off = V.distance(last);
        Mat C(k + i, n + 1);
        for (int b = 0; b < k + i; ++b) C.row(b) = q.segment(b * (n + 1), n + 1).transpose();
        Mat A = C * V.basis;  // constraints on coordinates of l in V_0
        Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
        Vec sv = svd.singularValues();
        double smallest = A.cols() > A.rows() ? 0.0 : sv[sv.size() - 1];
        Vec coeff = svd.matrixV().col(A.cols() - 1);
        r.ell = V.basis * coeff;
        r.ell.normalize();
        r.residual = std::max(off, (C * r.ell).cwiseAbs().maxCoeff());
        r.member = smallest <= eps && r.residual <= eps;
        return r;
    }

    /// Uniform over lines l in V_0 (unit sphere measure), then uniform in the clipped ball.
    std::vector<PlanarSample> sample(int m, std::uint64_t seed) const {
        std::vector<PlanarSample> out;
        if (empty) return out;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        double rad = std::sqrt(std::max(0.0, 1 - V.offset.squaredNorm()));
        Vec c = component_offset();
        for (int s = 0; s < m; ++s) {
            Vec ell = V.basis * random_unit(rng, V.dim());
            Mat W = component_basis(ell);
            Vec x = c;
            int dw = static_cast<int>(W.cols());
            if (dw > 0) {
                Vec dir = random_unit(rng, dw);
                double r = rad * std::pow(U(rng), 1.0 / dw);
                x += W * (r * dir);
            }
            out.push_back({x, ell});
        }
        return out;
    }
};

inline PlanarSqFamily sq_planar(const Subspace& V, int n, int k, int i) {
    if (V.d != n + 1) throw DomainError("V must be a subspace of R^{n+1}");
    if (V.dim() != k + 1) throw DomainError("V must have dimension k + 1");
    if (k < 0 || i < 0 || k + i < 1) throw DomainError("need k, i >= 0 and k + i >= 1");
    PlanarSqFamily f;
    f.n = n;
    f.k = k;
    f.i = i;
    f.V = Subspace::make(V.basis, V.offset);
    f.empty = f.V.offset.norm() >= 1.0;
    return f;
}

struct BisectionWitness {
    Vec ell;
    Vec midpoint;
    double orthogonality = 0;  // |<(x+y)/2, x-y>|
    double plane_residual = 0;  // distance of the midpoint from l^perp cap V
};

inline BisectionWitness bisection_witness(const Vec& x, const Vec& y, const Subspace& V) {
    Vec d = x - y;
    if (d.norm() <= 1e-14) throw DomainError("bisection needs distinct points");
    BisectionWitness w;
    w.ell = d.normalized();
    w.midpoint = 0.5 * (x + y);
    w.orthogonality = std::abs(w.midpoint.dot(d));
    w.plane_residual = std::max(std::abs(w.midpoint.dot(w.ell)), V.distance(w.midpoint));
    return w;
}

struct Chord {
    Vec x, y;
    double residual = 0;  // |(x+y)/2 - z|
};

/// The chord through z parallel to l, ends on the unit sphere: z + t l with t = +-sqrt(1 - |z|^2).
inline Chord chord_through(const Vec& z, const Vec& ell) {
    double zz = z.squaredNorm();
    if (zz >= 1) throw DomainError("z must lie in the open disk");
    Vec u = ell.normalized();
    if (std::abs(z.dot(u)) > 1e-9) throw DomainError("z must be orthogonal to the line");
    double t = std::sqrt(1 - zz);
    Chord c{z + t * u, z - t * u, 0};
    c.residual = (0.5 * (c.x + c.y) - z).norm();
    return c;
}

/// Residues (c_P, c_betaP) with c_P = (-1)^{i + m n(n+1)/2} (m!)^n, m = (p-1)/2, and c_betaP = -c_P.
/// For p = 2 both are 1.
inline std::pair<int, int> steenrod_coefficient(int p, int n, int i) {
    require_prime(p);
    if (p == 2) return {1, 1};
    long long m = (p - 1) / 2;
    long long fact = 1;
    for (long long j = 2; j <= m; ++j) fact = fact * j % p;
    long long mag = powmod(fact, n, p);
    long long e = i + m * (static_cast<long long>(n) * (n + 1) / 2);
    int cP = residue(e % 2 ? -mag : mag, p);
    return {cP, residue(-cP, p)};
}

}  // namespace modp
