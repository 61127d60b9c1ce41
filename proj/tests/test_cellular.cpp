#include "modp/cellular_oracle.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace modp;

namespace {

BigInt gcd(BigInt a, BigInt b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        BigInt t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Fraction-free determinant (Bareiss) of a small square matrix.
BigInt det(IntMat A) {
    int n = rows(A);
    BigInt prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (A[k][k] == 0) {
            int r = k + 1;
            while (r < n && A[r][k] == 0) ++r;
            if (r == n) return 0;
            std::swap(A[k], A[r]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev;
        prev = A[k][k];
    }
    return sign * A[n - 1][n - 1];
}

}  // namespace

TEST(Smith, InvariantsMatchDeterminantAndGcd) {
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<int> U(-6, 6);
    for (int t = 0; t < 100; ++t) {
        int n = 2 + t % 3;
        IntMat A = int_matrix(n, n);
        for (auto& row : A)
            for (auto& x : row) x = U(rng);
        BigInt d = det(A);
        auto diag = smith_diagonal(A);
        if (d == 0) {
            EXPECT_LT(static_cast<int>(diag.size()), n);
            continue;
        }
        ASSERT_EQ(static_cast<int>(diag.size()), n);
        BigInt prod = 1, g = 0;
        for (auto& v : diag) prod *= v;
        for (auto& row : A)
            for (auto& x : row) g = gcd(g, x);
        EXPECT_EQ(prod, d < 0 ? BigInt(-d) : d);
        EXPECT_EQ(diag.front(), g);
        for (std::size_t i = 0; i + 1 < diag.size(); ++i) EXPECT_EQ(diag[i + 1] % diag[i], 0);
    }
}

TEST(Lens, IntegralHomologyClosedForm) {
    for (int p : {2, 3, 5})
        for (int top : {3, 4, 5, 7}) {
            auto X = lens_complex(p, top);
            EXPECT_TRUE(dd_zero(X));
            auto H = integral_homology(X);
            ASSERT_EQ(static_cast<int>(H.size()), top + 1);
            EXPECT_EQ(H[0].str(), "Z");
            for (int k = 1; k <= top; ++k) {
                std::string want;
                if (k == top && k % 2 == 1) want = "Z";
                else if (k % 2 == 1) want = "Z_" + std::to_string(p);
                else want = "0";
                EXPECT_EQ(H[k].str(), want) << "p=" << p << " top=" << top << " k=" << k;
            }
            for (int k = 0; k <= top; ++k) EXPECT_EQ(cohomology_dim_mod(X, k, p), 1);
        }
}

TEST(Lens, ModThreeHomologyInLowDegrees) {
    auto X = lens_complex(3, 3);
    for (int k = 0; k <= 3; ++k) EXPECT_EQ(cohomology_dim_mod(X, k, 3), 1);
    // over another prime the torsion disappears
    EXPECT_EQ(cohomology_dim_mod(X, 1, 2), 0);
}

TEST(Cone, ProjectivePlane) {
    auto X = mapping_cone_degree_p(2);
    auto H = integral_homology(X);
    EXPECT_EQ(H[0].str(), "Z");
    EXPECT_EQ(H[1].str(), "Z_2");
    EXPECT_EQ(H[2].str(), "0");
    int chi = 0;
    for (int k = 0; k <= X.top(); ++k) chi += (k % 2 ? -1 : 1) * X.cells[k];
    EXPECT_EQ(chi, 1);
    for (int p : {2, 3, 5}) EXPECT_EQ(cohomology_dim_mod(mapping_cone_degree_p(p), 1, p), 1);
}

TEST(Snake, ConeGeneratorMapsToTopCell) {
    for (int p : {2, 3, 5}) {
        auto X = mapping_cone_degree_p(p);
        auto r = bockstein_snake(X, 1, {1}, p);
        ASSERT_EQ(r.value.size(), 1u);
        EXPECT_EQ(r.value[0], 1);
        EXPECT_TRUE(r.lift_independent);
    }
}

TEST(Snake, CoboundaryInputGivesZeroClass) {
    auto X = lens_complex(3, 5);
    // delta of the 1-cochain 1 is the coboundary in degree 2
    auto B = coboundaries(X, 2, 3);
    ASSERT_FALSE(B.empty());
    for (int a = 0; a < 3; ++a) {
        std::vector<int> psi = B[0];
        for (auto& x : psi) x = residue(static_cast<long long>(x) * a, 3);
        auto r = bockstein_snake(X, 2, psi, 3);
        EXPECT_TRUE(in_span(r.value, coboundaries(X, 3, 3), 3));
    }
}

TEST(Snake, LensBocksteinIsIsomorphismInDegreeOne) {
    auto X = lens_complex(3, 5);
    auto r = bockstein_snake(X, 1, {1}, 3);
    EXPECT_FALSE(in_span(r.value, coboundaries(X, 2, 3), 3));
    EXPECT_TRUE(r.lift_independent);
    auto c = check_beta(X, 1, 3);
    EXPECT_TRUE(c.isomorphism);
}

TEST(SnakeProperty, BetaBetaVanishes) {
    for (int p : {2, 3, 5})
        for (int top : {3, 5, 6}) {
            auto X = lens_complex(p, top);
            for (int k = 0; k + 1 <= top; ++k) {
                auto c = check_beta(X, k, p);
                EXPECT_TRUE(c.beta_beta_zero) << p << " " << top << " " << k;
                // on lens spaces beta is an isomorphism exactly from odd degrees
                if (k + 1 < top || top % 2 == 0) EXPECT_EQ(c.isomorphism, k % 2 == 1) << p << " " << k;
            }
        }
}

TEST(SnakeProperty, LiftIndependence) {
    for (int p : {3, 5}) {
        auto X = lens_complex(p, 5);
        for (int k = 0; k < 5; ++k)
            for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                for (int a = 1; a < p; ++a) {
                    auto r = bockstein_snake(X, k, {a}, p, seed);
                    EXPECT_TRUE(r.lift_independent);
                }
            }
    }
}

TEST(Sweep, FreeOrbitCountByEnumeration) {
    for (int p : {2, 3, 5}) {
        std::set<std::vector<int>> seen;
        long long free_orbits = 0, total = 1;
        for (int i = 0; i < p; ++i) total *= p;
        for (long long code = 0; code < total; ++code) {
            std::vector<int> t(p);
            long long c = code;
            for (int i = 0; i < p; ++i) {
                t[i] = static_cast<int>(c % p);
                c /= p;
            }
            if (seen.count(t)) continue;
            std::vector<int> r = t;
            int size = 0;
            std::set<std::vector<int>> orbit;
            for (int j = 0; j < p; ++j) {
                orbit.insert(r);
                std::rotate(r.begin(), r.begin() + 1, r.end());
            }
            size = static_cast<int>(orbit.size());
            seen.insert(orbit.begin(), orbit.end());
            if (size == p) ++free_orbits;
        }
        auto s = evaluate_family_class(p, 200);
        EXPECT_EQ(s.m, free_orbits);
        EXPECT_EQ(residue(free_orbits, p), p - 1);
    }
}

TEST(Sweep, EvaluationsAreMinusOne) {
    auto s2 = evaluate_family_class(2);
    EXPECT_EQ(s2.m, 1);
    EXPECT_EQ(s2.evaluation, 1);
    auto s3 = evaluate_family_class(3);
    EXPECT_EQ(s3.m, 8);
    EXPECT_EQ(s3.evaluation, 1);  // -8 = 1 mod 3
    EXPECT_EQ(residue(s3.coefficient_sum, 3), residue(s3.m, 3));
    EXPECT_EQ(evaluate_family_class(3, 100, 0.9, 0.3, true).evaluation, 0);
}
