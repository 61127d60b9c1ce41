#include "modp/chains.hpp"
#include "modp/flat_norm.hpp"
#include "modp/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace modp;

namespace {

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

Vec v3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

// Random k-chain in R^3 on a shared vertex pool so that faces actually meet.
SimplicialChain random_complex(std::mt19937_64& rng, int p, int k) {
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<Vec> pool;
    for (int i = 0; i < 7; ++i) pool.push_back(v3(U(rng), U(rng), U(rng)));
    SimplicialChain T(p, Ambient::euclidean(3), k);
    std::uniform_int_distribution<int> pick(0, 6), coef(1, p - 1);
    for (int s = 0; s < 6; ++s) {
        std::vector<int> idx;
        while (static_cast<int>(idx.size()) < k + 1) {
            int j = pick(rng);
            if (std::find(idx.begin(), idx.end(), j) == idx.end()) idx.push_back(j);
        }
        std::vector<Vec> verts;
        for (int j : idx) verts.push_back(pool[j]);
        T.add(verts, coef(rng));
    }
    return T.canonicalize();
}

}  // namespace

TEST(Chains, ZeroChainMass) {
    ZeroChain z(3, Ambient::euclidean(2));
    z.add({0.2, 0.4}, 2);
    EXPECT_DOUBLE_EQ(z.mass(), 1.0);
    EXPECT_DOUBLE_EQ(ZeroChain(3, Ambient::euclidean(2)).mass(), 0.0);
}

TEST(Chains, SegmentMass) {
    SimplicialChain T(2, Ambient::euclidean(2), 1);
    T.add({v2(0, 0), v2(1, 0)}, 1);
    EXPECT_NEAR(T.mass(), 1.0, 1e-12);
}

TEST(Chains, SphereArcUsesGeodesicLength) {
    SimplicialChain T(2, Ambient::sphere(1), 1);
    T.add({v2(1, 0), v2(0, 1)}, 1);
    EXPECT_NEAR(T.mass(), M_PI / 2, 1e-12);
}

TEST(Chains, BoundaryExamples) {
    SimplicialChain tri(2, Ambient::euclidean(2), 1);
    tri.add({v2(0, 0), v2(1, 0)}, 1);
    tri.add({v2(1, 0), v2(0, 1)}, 1);
    tri.add({v2(0, 1), v2(0, 0)}, 1);
    EXPECT_TRUE(boundary(tri).is_zero());

    SimplicialChain seg(3, Ambient::euclidean(2), 1);
    seg.add({v2(0, 0), v2(1, 0)}, 1);
    ZeroChain b = to_zero_chain(boundary(seg));
    ZeroChain want(3, Ambient::euclidean(2));
    want.add({1, 0}, 1);
    want.add({0, 0}, 2);
    EXPECT_TRUE(b.equals(want));

    SimplicialChain sq(2, Ambient::euclidean(2), 1);
    std::vector<Vec> c{v2(0, 0), v2(1, 0), v2(1, 1), v2(0, 1)};
    for (int i = 0; i < 4; ++i) sq.add({c[i], c[(i + 1) % 4]}, 1);
    EXPECT_TRUE(boundary(sq).is_zero());
}

TEST(ChainsProperty, BoundaryOfBoundaryVanishes) {
    std::mt19937_64 rng(11);
    int cases = 0;
    for (int p : {2, 3, 5})
        for (int k : {2, 3})
            for (int t = 0; t < 20; ++t) {
                auto T = random_complex(rng, p, k);
                EXPECT_TRUE(boundary(boundary(T)).is_zero());
                ++cases;
            }
    EXPECT_GE(cases, 100);
}

TEST(ChainsProperty, MassSubadditiveAndScaling) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 50; ++t) {
        int p = t % 3 == 0 ? 2 : (t % 3 == 1 ? 3 : 5);
        auto S = random_complex(rng, p, 2), T = random_complex(rng, p, 2);
        EXPECT_LE((S + T).mass(), S.mass() + T.mass() + 1e-12);
        for (int a = 0; a < p; ++a) {
            SimplicialChain aT = T;
            for (auto& s : aT.simplices) s.c = residue(static_cast<long long>(s.c) * a, p);
            aT.canonicalize();
            // |a| = min(a, p - a) bounds the growth; for p <= 3 every nonzero weight is 1
            double m = aT.empty() ? 0.0 : aT.mass();
            EXPECT_LE(m, weight(a, p) * T.mass() + 1e-12);
            if (p <= 3 && a != 0) EXPECT_NEAR(m, T.mass(), 1e-12);
        }
    }
}

TEST(Chains, RelativeChainDropsBoundaryAtoms) {
    SimplicialChain seg(2, Ambient::disk(2), 1, true);
    seg.add({v2(0, 0), v2(1, 0)}, 1);
    ZeroChain b = to_zero_chain(boundary(seg));
    ASSERT_EQ(b.atoms.size(), 1u);
    EXPECT_NEAR(b.atoms[0].x[0], 0.0, 1e-15);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> A(0, 2 * M_PI);
    for (int t = 0; t < 50; ++t) {
        SimplicialChain T(3, Ambient::disk(2), 1, true);
        double a = A(rng), c = A(rng);
        T.add({v2(0.3 * std::cos(c), 0.3 * std::sin(c)), v2(std::cos(a), std::sin(a))}, 1 + t % 2);
        for (auto& s : boundary(T).simplices) EXPECT_FALSE(T.ambient.in_boundary_region(s.v[0]));
    }
}

TEST(Chains, ProductOfSegmentsIsUnitSquare) {
    SimplicialChain a(2, Ambient::euclidean(1), 1), b(2, Ambient::euclidean(1), 1);
    Vec z(1), o(1);
    z << 0;
    o << 1;
    a.add({z, o}, 1);
    b.add({z, o}, 1);
    auto P = cartesian_product(a, b);
    EXPECT_EQ(P.k, 2);
    EXPECT_NEAR(P.mass(), 1.0, 1e-6);
    EXPECT_TRUE(cartesian_product(a, SimplicialChain(2, Ambient::euclidean(1), 1)).empty());
}

TEST(Chains, ZeroChainProductMultipliesCoefficients) {
    ZeroChain S(5, Ambient::euclidean(1)), T(5, Ambient::euclidean(1));
    S.add({0}, 2);
    S.add({1}, 3);
    T.add({4}, 4);
    auto P = cartesian_product(S, T);
    ASSERT_EQ(P.atoms.size(), 2u);
    EXPECT_EQ(P.atoms[0].c, 3);  // 2*4 = 8
    EXPECT_EQ(P.atoms[1].c, 2);  // 3*4 = 12
}

TEST(ChainsProperty, LeibnizRule) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int t = 0; t < 30; ++t) {
        int p = t % 3 == 0 ? 2 : (t % 3 == 1 ? 3 : 5);
        int ks = 1 + t % 2, kt = 1;
        SimplicialChain S(p, Ambient::euclidean(2), ks), T(p, Ambient::euclidean(2), kt);
        for (int i = 0; i < 3; ++i) {
            std::vector<Vec> vs, vt;
            for (int j = 0; j <= ks; ++j) vs.push_back(v2(U(rng), U(rng)));
            for (int j = 0; j <= kt; ++j) vt.push_back(v2(U(rng), U(rng)));
            S.add(vs, 1 + i % (p - 1 > 0 ? p - 1 : 1));
            T.add(vt, 1);
        }
        S.canonicalize();
        T.canonicalize();
        auto lhs = boundary(cartesian_product(S, T));
        auto a = cartesian_product(boundary(S), T);
        auto b = cartesian_product(S, boundary(T));
        auto rhs = ks % 2 ? a - b : a + b;
        EXPECT_TRUE((lhs - rhs).is_zero()) << "p=" << p << " k=" << ks;
    }
}

TEST(Chains, PushforwardIsometryAndScaling) {
    SimplicialChain seg(2, Ambient::euclidean(2), 1);
    seg.add({v2(0, 0), v2(1, 0)}, 1);
    Mat R(2, 2);
    R << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
    MapDescriptor iso{[R](const Vec& x) -> Vec { return R * x + v2(3, -1); }, {}, Ambient::euclidean(2), true};
    auto a = pushforward(seg, iso);
    EXPECT_NEAR(a.image.mass(), 1.0, 1e-12);
    EXPECT_NEAR(a.mass_estimate, 1.0, 1e-6);
    MapDescriptor dbl{[](const Vec& x) -> Vec { return 2 * x; }, {}, Ambient::euclidean(2), true};
    auto b = pushforward(seg, dbl);
    EXPECT_NEAR(b.image.mass(), 2.0, 1e-12);
    EXPECT_NEAR(b.mass_estimate, 2.0, 1e-6);
}

TEST(Chains, PushforwardCurvedMapMatchesQuadrature) {
    // x -> (cos x, sin x) on [0, 1] has length 1; the estimate uses the Jacobian.
    SimplicialChain seg(2, Ambient::euclidean(1), 1);
    Vec a(1), b(1);
    a << 0;
    b << 1;
    seg.add({a, b}, 1);
    MapDescriptor m{[](const Vec& x) -> Vec { return v2(std::cos(x[0]), std::sin(x[0])); }, {},
                    Ambient::euclidean(2), false};
    auto r = pushforward(seg, m, 4);
    EXPECT_NEAR(r.mass_estimate, 1.0, 1e-6);
    EXPECT_NEAR(r.image.mass(), 16 * 2 * std::sin(1.0 / 32), 1e-12);
}

TEST(Chains, MassConcentrationProfile) {
    SimplicialChain seg(2, Ambient::euclidean(2), 1);
    seg.add({v2(0, 0), v2(1, 0)}, 1);
    auto prof = mass_concentration_profile({seg}, {0.0, 2.0});
    EXPECT_DOUBLE_EQ(prof.samples[0].second, 0.0);
    EXPECT_NEAR(prof.samples[1].second, 1.0, 1e-12);

    SimplicialChain two(2, Ambient::euclidean(2), 1);
    two.add({v2(0, 0), v2(1, 0)}, 1);
    two.add({v2(10, 0), v2(11, 0)}, 1);
    auto p2 = mass_concentration_profile({two}, {0.1});
    EXPECT_NEAR(p2.samples[0].second, 0.2, 1e-12);
}

TEST(Chains, NonOverlapCheck) {
    SimplicialChain T(2, Ambient::euclidean(2), 2);
    T.add({v2(0, 0), v2(1, 0), v2(0, 1)}, 1);
    T.add({v2(1, 0), v2(1, 1), v2(0, 1)}, 1);
    EXPECT_TRUE(non_overlapping(T));
    T.add({v2(0.1, 0.1), v2(0.9, 0.1), v2(0.1, 0.9)}, 1);
    EXPECT_FALSE(non_overlapping(T));
}

TEST(Chains, InvalidInputsRejected) {
    ZeroChain z(4, Ambient::euclidean(1));
    z.add({0}, 1);
    EXPECT_THROW(z.validate(), DomainError);
    ZeroChain s(2, Ambient::sphere(1));
    s.add({0.5, 0.5}, 1);
    EXPECT_THROW(s.validate(), InvalidChain);
}

TEST(ChainsIo, JsonRoundTrip) {
    ZeroChain z(3, Ambient::sphere(1));
    z.add({1, 0}, 1);
    z.add({0, -1}, 2);
    z.canonicalize();
    auto back = zero_chain_from_json<double>(zero_chain_to_json(z));
    EXPECT_TRUE(back.equals(z));

    SimplicialChain T(3, Ambient::disk(2), 1, true);
    T.add({v2(0, 0), v2(0.5, 0.5)}, 2);
    auto j = simplicial_to_json(T);
    auto U = simplicial_from_json(j);
    EXPECT_TRUE((U - T).is_zero());
    EXPECT_TRUE(U.relative);
}

TEST(ChainsIo, SchemaErrorsNameTheField) {
    json j = json::parse(R"({"p": 3, "ambient": {"kind": "sphere", "dim": 1}})");
    try {
        zero_chain_from_json<double>(j);
        FAIL() << "expected a schema error";
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("atoms"), std::string::npos);
    }
}

// ---------------------------------------------------------------------------
// flat norm

namespace {

// p = 2 brute force over unit subsets: each point is dropped (1), pushed to the
// boundary (relative), or paired with another point (distance). Bitmask DP.
double p2_oracle(const std::vector<Vec>& pts, const Ambient& amb, bool relative) {
    int n = static_cast<int>(pts.size());
    std::vector<double> best(1u << n, 0);
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        int i = __builtin_ctz(mask);
        unsigned rest = mask & ~(1u << i);
        double single = 1.0;
        if (relative) single = std::min(single, amb.boundary_distance(pts[i]));
        double b = best[rest] + single;
        for (int j = i + 1; j < n; ++j)
            if (rest >> j & 1) b = std::min(b, best[rest & ~(1u << j)] + amb.distance(pts[i], pts[j]));
        best[mask] = b;
    }
    return best[(1u << n) - 1];
}

}  // namespace

TEST(FlatNorm, ArcOnCircle) {
    ZeroChain S(2, Ambient::sphere(1)), T(2, Ambient::sphere(1));
    S.add({1, 0}, 1);
    T.add({0, 1}, 1);
    auto r = flat_distance_0(S, T);
    EXPECT_NEAR(r.value, M_PI / 2, 1e-12);
    EXPECT_TRUE(r.verified);
    EXPECT_EQ(r.certificate.P.simplices.size(), 1u);
}

TEST(FlatNorm, SelfDistanceIsZero) {
    ZeroChain S(3, Ambient::euclidean(2));
    S.add({0.1, 0.2}, 1);
    S.add({0.5, 0.2}, 2);
    auto r = flat_distance_0(S, S);
    EXPECT_DOUBLE_EQ(r.value, 0.0);
    EXPECT_TRUE(r.certificate.P.simplices.empty());
    EXPECT_TRUE(r.certificate.Q.empty());
}

TEST(FlatNorm, RadialSegmentToBoundary) {
    ZeroChain S(2, Ambient::disk(2), true), Z(2, Ambient::disk(2), true);
    S.add({0.9, 0}, 1);
    EXPECT_NEAR(flat_distance_0(S, Z).value, 0.1, 1e-12);
}

TEST(FlatNorm, DropCostUsesWeight) {
    ZeroChain S(3, Ambient::euclidean(2)), Z(3, Ambient::euclidean(2));
    S.add({0.3, 0.3}, 2);
    EXPECT_NEAR(flat_distance_0(S, Z).value, 1.0, 1e-12);
}

TEST(FlatNorm, CollinearPointsPairUp) {
    ZeroChain S(2, Ambient::euclidean(1)), Z(2, Ambient::euclidean(1));
    for (int i = 0; i < 4; ++i) S.add({static_cast<double>(i)}, 1);
    EXPECT_NEAR(flat_distance_0(S, Z).value, 2.0, 1e-12);
    EXPECT_NEAR(flat_oracle_0(S, Z).value, 2.0, 1e-12);
}

TEST(FlatNormProperty, MatchesIndependentP2Oracle) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int t = 0; t < 200; ++t) {
        bool rel = t % 2;
        Ambient amb = rel ? Ambient::disk(2) : Ambient::euclidean(2);
        int n = 2 + static_cast<int>(rng() % 9);
        ZeroChain S(2, amb, rel), Z(2, amb, rel);
        std::vector<Vec> pts;
        while (static_cast<int>(pts.size()) < n) {
            Vec x = 0.6 * v2(U(rng), U(rng));
            if (rel && x.norm() > 0.99) continue;
            pts.push_back(x);
            S.add(to_std(x), 1);
        }
        double want = p2_oracle(pts, amb, rel);
        auto r = flat_distance_0(S, Z);
        EXPECT_NEAR(r.value, want, 1e-9) << "instance " << t;
        EXPECT_TRUE(r.verified);
    }
}

TEST(FlatNormProperty, TriangleInequalityAndMassBound) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> U(-0.7, 0.7);
    for (int t = 0; t < 100; ++t) {
        int p = t % 2 ? 3 : 2;
        Ambient amb = Ambient::disk(2);
        auto make = [&] {
            ZeroChain c(p, amb, true);
            int n = 1 + static_cast<int>(rng() % 3);
            for (int i = 0; i < n; ++i) c.add({U(rng), U(rng)}, 1 + static_cast<int>(rng() % (p - 1 > 0 ? p - 1 : 1)));
            return c.canonicalize();
        };
        ZeroChain S = make(), T = make(), W = make();
        double st = flat_distance_0(S, T).value, tw = flat_distance_0(T, W).value, sw = flat_distance_0(S, W).value;
        EXPECT_LE(sw, st + tw + 1e-9);
        EXPECT_LE(st, (S - T).mass() + 1e-12);
    }
}

TEST(FlatNormProperty, CertificateReproducesDifference) {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> U(-0.7, 0.7);
    for (int t = 0; t < 100; ++t) {
        int p = t % 3 == 0 ? 2 : (t % 3 == 1 ? 3 : 5);
        ZeroChain S(p, Ambient::disk(2), true), T(p, Ambient::disk(2), true);
        for (int i = 0; i < 3; ++i) {
            S.add({U(rng), U(rng)}, 1 + static_cast<int>(rng() % (p - 1 > 0 ? p - 1 : 1)));
            T.add({U(rng), U(rng)}, 1);
        }
        auto r = flat_distance_0(S, T);
        // recompute dP + Q from the certificate alone
        ZeroChain lhs = r.certificate.Q;
        if (!r.certificate.P.simplices.empty()) lhs = lhs + to_zero_chain(boundary(r.certificate.P));
        EXPECT_TRUE((lhs - (S - T)).canonical().empty()) << "instance " << t;
        EXPECT_NEAR(r.certificate.cost, r.value, 1e-9);
    }
}

TEST(FlatNorm, PClusterAnnihilatesAtSteinerNode) {
    const double eps = 0.01;
    for (int p : {3, 5}) {
        ZeroChain S(p, Ambient::euclidean(2)), Z(p, Ambient::euclidean(2));
        for (int j = 0; j < p; ++j) S.add({1 + eps * std::cos(2 * M_PI * j / p), eps * std::sin(2 * M_PI * j / p)}, 1);
        auto r = flat_distance_0(S, Z);
        EXPECT_LE(r.value, p * eps + 1e-9);
        EXPECT_NEAR(r.value, flat_oracle_0(S, Z).value, 1e-9);
    }
}

TEST(FlatNorm, ConeOverSixteenGon) {
    SimplicialChain T(2, Ambient::euclidean(2), 1);
    for (int j = 0; j < 16; ++j) {
        double a = 2 * M_PI * j / 16, b = 2 * M_PI * (j + 1) / 16;
        T.add({v2(std::cos(a), std::sin(a)), v2(std::cos(b), std::sin(b))}, 1);
    }
    auto r = cone_filling_upper_bound(T, v2(0, 0));
    // 16 isosceles triangles with apex angle pi/8
    EXPECT_NEAR(r.bound, 8 * std::sin(M_PI / 8), 1e-12);
    EXPECT_TRUE(r.boundary_verified);
    auto zero = cone_filling_upper_bound(SimplicialChain(2, Ambient::euclidean(2), 1), v2(0, 0));
    EXPECT_DOUBLE_EQ(zero.bound, 0.0);
}

TEST(FlatNorm, ConeInDiskFillsEquator) {
    SimplicialChain T(2, Ambient::disk(3), 1);
    T.add({v3(1, 0, 0), v3(-1, 0, 0)}, 1);
    T.add({v3(-1, 0, 0), v3(0, 1, 0)}, 1);
    T.add({v3(0, 1, 0), v3(1, 0, 0)}, 1);
    auto r = cone_filling_upper_bound(T, v3(0, 0, 0.5));
    EXPECT_TRUE(r.boundary_verified);
}
