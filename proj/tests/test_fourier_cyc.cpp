#include "modp/bockstein_cyc.hpp"
#include "modp/cyclic_fourier.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

using namespace modp;

namespace {

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

Mat svd_values(const Mat& J) {
    Eigen::JacobiSVD<Mat> svd(J);
    return svd.singularValues();
}

// Rational point of the unit circle from stereographic parameter t.
std::vector<Rational> circle_point(Rational t) {
    Rational d = 1 + t * t;
    return {(1 - t * t) / d, 2 * t / d};
}

// All p-tuples of unit indices, grouped into rotation classes by brute force.
// Non-constant classes contribute their barycenter with coefficient 1.
ExactZeroChain orbit_oracle(const ExactZeroChain& T) {
    const int p = T.p;
    std::vector<std::vector<Rational>> units;
    for (auto& a : T.canonical().atoms)
        for (int i = 0; i < a.c; ++i) units.push_back(a.x);
    const int k = static_cast<int>(units.size());
    ExactZeroChain out(p, Ambient::disk(T.ambient.dim + 1), true);
    std::set<std::vector<int>> seen;
    std::vector<int> tup(p, 0);
    long total = 1;
    for (int i = 0; i < p; ++i) total *= k;
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (int i = 0; i < p; ++i) {
            tup[i] = static_cast<int>(c % k);
            c /= k;
        }
        if (seen.count(tup)) continue;
        std::vector<int> rot = tup;
        for (int r = 0; r < p; ++r) {
            seen.insert(rot);
            std::rotate(rot.begin(), rot.begin() + 1, rot.end());
        }
        if (std::all_of(tup.begin(), tup.end(), [&](int u) { return u == tup[0]; })) continue;
        std::vector<Rational> bary(units[0].size(), Rational(0));
        for (int u : tup)
            for (std::size_t d = 0; d < bary.size(); ++d) bary[d] += units[u][d] / p;
        out.add(bary, 1);
    }
    return out.canonicalize();
}

ExactZeroChain random_exact_cycle(std::mt19937_64& rng, int p, int atoms) {
    ExactZeroChain T(p, Ambient::sphere(1));
    std::uniform_int_distribution<int> num(-12, 12), coef(1, p - 1);
    for (int i = 0; i < atoms; ++i) T.add(circle_point(Rational(num(rng), 5)), coef(rng));
    return T.canonicalize();
}

}  // namespace

// ---------------------------------------------------------------------------
// DFT

TEST(Fourier, TwoPointMatrix) {
    RealDFT d = build_dft(2);
    Mat want(2, 2);
    want << 1, 1, 1, -1;
    want /= std::sqrt(2.0);
    EXPECT_LT((d.F - want).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Fourier, OrthogonalAndDiagonalizesShift) {
    for (int p : {2, 3, 5, 7}) {
        RealDFT d = build_dft(p);
        EXPECT_LT((d.F * d.F.transpose() - Mat::Identity(p, p)).cwiseAbs().maxCoeff(), 1e-12) << p;
        // the shift moves coordinate i to i+1
        Mat M = Mat::Zero(p, p);
        for (int i = 0; i < p; ++i) M((i + 1) % p, i) = 1;
        Mat Fs = d.F * M * d.F.transpose();
        EXPECT_LT((Fs - d.D).cwiseAbs().maxCoeff(), 1e-12) << p;
        EXPECT_LT((d.M - d.F.transpose() * d.D * d.F).cwiseAbs().maxCoeff(), 1e-12) << p;
    }
}

TEST(Fourier, KernelOfPerpIsDiagonal) {
    std::mt19937_64 rng(5);
    for (int p : {2, 3, 5})
        for (int n : {1, 2}) {
            DiagonalExcisionMap f(p, n);
            Vec x = gaussian_vec(rng, n + 1), d(p * (n + 1));
            for (int j = 0; j < p; ++j) d.segment(j * (n + 1), n + 1) = x;
            EXPECT_LT((f.Fperp * d).norm(), 1e-12);
            EXPECT_EQ(f.Fperp.rows(), (p - 1) * (n + 1));
        }
}

TEST(Fourier, MapOnSimplePoint) {
    DiagonalExcisionMap f(2, 1);
    Vec x(4);
    x << 1, 0, 0, 1;
    auto [u, m] = f(x);
    EXPECT_NEAR(m[0], 0.5, 1e-15);
    EXPECT_NEAR(m[1], 0.5, 1e-15);
    // F_perp x = (x_1 - x_2)/sqrt 2
    EXPECT_NEAR(u[0], 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(u[1], -1 / std::sqrt(2.0), 1e-15);
}

TEST(FourierProperty, ShiftEquivariance) {
    std::mt19937_64 rng(6);
    for (int p : {2, 3, 5}) {
        DiagonalExcisionMap f(p, 1);
        for (int t = 0; t < 400; ++t) {
            Vec x = random_unit(rng, f.dim());
            auto [u, m] = f(x);
            auto [u2, m2] = f(f.shift * x);
            EXPECT_LT((m2 - m).norm(), 1e-12);
            Vec rot = u;
            double err = 1;
            for (int j = 0; j < p; ++j) {
                err = std::min(err, (u2 - rot).norm());
                rot = f.Dperp * rot;
            }
            EXPECT_LT(err, 1e-12);
        }
    }
}

TEST(Fourier, NearDiagonalPointsRejected) {
    DiagonalExcisionMap f(3, 1);
    Vec x = Vec::Ones(6) / std::sqrt(6.0);
    EXPECT_THROW(f(x), DomainError);
}

TEST(Fourier, SpherePointAtDistanceHasScaledMean) {
    std::mt19937_64 rng(9);
    for (int p : {2, 3})
        for (double eps : {0.05, 0.5}) {
            DiagonalExcisionMap f(p, 1);
            Vec v = f.point_at_distance(eps, random_unit(rng, 2), random_unit(rng, f.lens_dim()));
            EXPECT_NEAR(v.norm(), 1.0, 1e-12);
            EXPECT_NEAR(f.diagonal_distance(v), eps, 1e-12);
            EXPECT_NEAR(f.mean(v).norm(), std::sqrt(1 - eps * eps) / std::sqrt(static_cast<double>(p)), 1e-12);
        }
}

// The Jacobian of x -> ((x1-x2)/|x1-x2|, (x1+x2)/2) for p = 2, n = 1, built from
// scratch: 1/eps on the one tangent lens direction, 1/sqrt 2 on the mean, 0 radially.
TEST(Fourier, JacobianPatternTwoPoints) {
    auto g = [](const Vec& x) {
        Vec d = (x.head(2) - x.tail(2)) / std::sqrt(2.0);
        Vec out(4);
        out << d / d.norm(), 0.5 * (x.head(2) + x.tail(2));
        return out;
    };
    DiagonalExcisionMap f(2, 1);
    Vec v = f.point_at_distance(0.1, v2(0.6, 0.8), v2(1, 0));
    Mat J(4, 4);
    const double h = 1e-6;
    for (int i = 0; i < 4; ++i) {
        Vec e = Vec::Zero(4);
        e[i] = h;
        J.col(i) = (g(v + e) - g(v - e)) / (2 * h);
    }
    Vec s = svd_values(J);
    EXPECT_NEAR(s[0], 10.0, 1e-5);
    EXPECT_NEAR(s[1], 1 / std::sqrt(2.0), 1e-6);
    EXPECT_NEAR(s[2], 1 / std::sqrt(2.0), 1e-6);
    EXPECT_NEAR(s[3], 0.0, 1e-6);
    auto split = jacobian_split(f, v);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(split.analytic[i], s[i], 1e-5 * std::max(1.0, s[i]));
}

TEST(FourierProperty, JacobianMatchesFiniteDifferences) {
    std::mt19937_64 rng(7);
    for (int p : {2, 3})
        for (int n : {1, 2})
            for (double eps : {0.05, 0.1, 0.5, 1.0}) {
                DiagonalExcisionMap f(p, n);
                Vec v = f.point_at_distance(eps, random_unit(rng, n + 1), random_unit(rng, f.lens_dim()));
                auto s = jacobian_split(f, v);
                EXPECT_LT(s.max_rel_error, 1e-5) << p << " " << n << " " << eps;
                EXPECT_EQ(s.inv_sqrtp_count, n + 1);
                EXPECT_EQ(s.inv_eps_count, (p - 1) * (n + 1) - 1);
                for (std::size_t i = 0; i < s.analytic.size(); ++i)
                    EXPECT_NEAR(s.analytic[i], s.finite_difference[i], 1e-5 * std::max(1.0, s.analytic[i]));
            }
}

// ---------------------------------------------------------------------------
// orbits

TEST(Orbits, Examples) {
    auto o = orbit_enumerate(3, 3);
    EXPECT_EQ(o.size(), 11u);
    std::set<std::vector<int>> reps;
    for (auto& n : o) reps.insert(n.rep);
    EXPECT_TRUE(reps.count({1, 2, 3}));
    EXPECT_TRUE(reps.count({1, 3, 2}));
    EXPECT_EQ(orbit_enumerate(1, 3).size(), 1u);
    auto o42 = orbit_enumerate(4, 2);
    EXPECT_EQ(o42.size(), 10u);
    EXPECT_EQ(std::count_if(o42.begin(), o42.end(), [](const Necklace& n) { return n.constant; }), 4);
}

TEST(OrbitsProperty, MatchesBruteForceAndBurnside) {
    for (int p : {2, 3, 5})
        for (int k = 1; k <= 6; ++k) {
            long total = 1;
            for (int i = 0; i < p; ++i) total *= k;
            std::set<std::vector<int>> classes;
            std::map<std::vector<int>, int> size;
            for (long code = 0; code < total; ++code) {
                std::vector<int> t(p);
                long c = code;
                for (int i = 0; i < p; ++i) {
                    t[i] = 1 + static_cast<int>(c % k);
                    c /= k;
                }
                std::vector<int> m = t, r = t;
                for (int j = 0; j < p; ++j) {
                    std::rotate(r.begin(), r.begin() + 1, r.end());
                    m = std::min(m, r);
                }
                classes.insert(m);
            }
            auto o = orbit_enumerate(k, p);
            ASSERT_EQ(o.size(), classes.size()) << "k=" << k << " p=" << p;
            EXPECT_EQ(static_cast<long long>(o.size()), burnside_count(k, p));
            for (auto& n : o) {
                EXPECT_TRUE(classes.count(n.rep));
                EXPECT_EQ(n.orbit_size, n.constant ? 1 : p);
            }
        }
}

TEST(Orbits, FreeOrbitCount) {
    EXPECT_EQ(count_free_orbits(2).m, 1);
    EXPECT_EQ(count_free_orbits(3).m, 8);
    EXPECT_EQ(count_free_orbits(5).m, 624);
    for (int p : {2, 3, 5, 7}) EXPECT_TRUE(count_free_orbits(p).is_minus_one);
}

// ---------------------------------------------------------------------------
// rank of projections onto the diagonal

TEST(ProjectionRank, Examples) {
    std::mt19937_64 rng(8);
    Mat B = Eigen::HouseholderQR<Mat>(gaussian_vec(rng, 4).replicate(1, 1)).householderQ() * Mat::Identity(4, 2);
    auto r = rank_of_diagonal_projection({B, B, B});
    EXPECT_EQ(r.rank, 2);
    auto z = rank_of_diagonal_projection({Mat::Zero(4, 0), Mat::Zero(4, 0)});
    EXPECT_EQ(z.rank, 0);
}

TEST(ProjectionRankProperty, BoundHolds) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 200; ++t) {
        int p = t % 2 ? 3 : 2, m = 2 + t % 3;
        std::vector<Mat> bs;
        for (int j = 0; j < p; ++j) {
            int d = static_cast<int>(rng() % (m + 1));
            Mat G(m, d);
            for (int c = 0; c < d; ++c) G.col(c) = gaussian_vec(rng, m);
            bs.push_back(d ? Mat(Eigen::HouseholderQR<Mat>(G).householderQ() * Mat::Identity(m, d)) : Mat::Zero(m, 0));
        }
        auto r = rank_of_diagonal_projection(bs);
        EXPECT_TRUE(r.bound_holds);
        EXPECT_LE(r.rank, m);
    }
}

// ---------------------------------------------------------------------------
// Bockstein representative and cyclic product on 0-cycles

TEST(Bockstein, SquareGivesSixMidpoints) {
    ExactZeroChain sq(2, Ambient::sphere(1));
    sq.add({1, 0}, 1);
    sq.add({0, 1}, 1);
    sq.add({-1, 0}, 1);
    sq.add({0, -1}, 1);
    auto b = bockstein_b(sq);
    EXPECT_EQ(b.terms.size(), 6u);
    // (13) and (24) both land on the origin with total coefficient 2 = 0
    EXPECT_EQ(b.chain.atoms.size(), 4u);
    for (auto& a : b.chain.atoms) EXPECT_EQ(a.c, 1);
    EXPECT_TRUE(b.chain.equals(orbit_oracle(sq)));
}

TEST(Bockstein, TriangleTrisectionsAndBarycenter) {
    ExactZeroChain tri(3, Ambient::sphere(1));
    tri.add(circle_point(0), 1);
    tri.add(circle_point(2), 1);
    tri.add(circle_point(Rational(-1, 3)), 1);
    auto b = bockstein_b(tri);
    int twos = 0, ones = 0;
    for (auto& a : b.chain.atoms) (a.c == 2 ? twos : ones)++;
    EXPECT_EQ(ones, 6);
    EXPECT_EQ(twos, 1);
    EXPECT_TRUE(b.chain.equals(orbit_oracle(tri)));
}

TEST(Bockstein, TwoPointsGiveOneMidpoint) {
    ExactZeroChain two(2, Ambient::sphere(1));
    two.add(circle_point(Rational(1, 2)), 1);
    two.add(circle_point(Rational(-3, 2)), 1);
    auto b = bockstein_b(two);
    ASSERT_EQ(b.chain.atoms.size(), 1u);
}

TEST(Bockstein, EmptyAndSinglePoint) {
    ExactZeroChain z(3, Ambient::sphere(1));
    EXPECT_TRUE(bockstein_b(z).chain.empty());
    z.add({1, 0}, 1);
    EXPECT_TRUE(bockstein_b(z).chain.empty());
    EXPECT_TRUE(cyc_0(z).atoms.empty());
}

TEST(BocksteinProperty, MatchesTupleRotationOracle) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 60; ++t) {
        int p = t % 3 == 0 ? 2 : (t % 3 == 1 ? 3 : 5);
        int atoms = p == 5 ? 2 : 2 + static_cast<int>(rng() % 3);
        auto T = random_exact_cycle(rng, p, atoms);
        if (T.units() > (p == 5 ? 5 : 7)) continue;
        EXPECT_TRUE(bockstein_b(T).chain.equals(orbit_oracle(T))) << "instance " << t << " p=" << p;
    }
}

TEST(BocksteinProperty, AtomOrderDoesNotMatter) {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 20; ++t) {
        auto T = random_exact_cycle(rng, 3, 4);
        ExactZeroChain S = T;
        std::shuffle(S.atoms.begin(), S.atoms.end(), rng);
        EXPECT_TRUE(bockstein_b(S).chain.equals(bockstein_b(T).chain));
        auto a = cyc_0(S).as_chain(), b = cyc_0(T).as_chain();
        EXPECT_TRUE(a.equals(b));
    }
}

TEST(Cyc, SquareAtomsCarryLineAndMidpoint) {
    ZeroChain sq(2, Ambient::sphere(1));
    std::vector<Vec> pts{v2(1, 0), v2(0, 1), v2(-1, 0), v2(0, -1)};
    for (auto& x : pts) sq.add(to_std(x), 1);
    auto c = cyc_0(sq);
    EXPECT_EQ(c.atoms.size(), 6u);
    for (auto& a : c.atoms) {
        Vec mid = to_vec(a.disk);
        bool found = false;
        for (std::size_t i = 0; i < 4 && !found; ++i)
            for (std::size_t j = i + 1; j < 4 && !found; ++j) {
                if ((0.5 * (pts[i] + pts[j]) - mid).norm() > 1e-12) continue;
                Vec d = (pts[i] - pts[j]).normalized();
                found = std::abs(std::abs(d.dot(a.lens.rep)) - 1) < 1e-12;
            }
        EXPECT_TRUE(found);
    }
}

TEST(CycProperty, DiskProjectionEqualsBockstein) {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 40; ++t) {
        int p = t % 2 ? 3 : 2;
        auto T = random_exact_cycle(rng, p, 2 + static_cast<int>(rng() % 3));
        if (T.units() > 8) continue;
        EXPECT_TRUE(cyc_0(T).disk_projection().equals(bockstein_b(T).chain));
    }
}

TEST(CycProperty, RotationActsOnBothFactors) {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> A(0, 2 * M_PI);
    for (int t = 0; t < 20; ++t) {
        ZeroChain T(3, Ambient::sphere(1));
        for (int i = 0; i < 3; ++i) {
            double a = A(rng);
            T.add({std::cos(a), std::sin(a)}, 1);
        }
        double th = A(rng);
        Mat R(2, 2);
        R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        ZeroChain RT(3, Ambient::sphere(1));
        for (auto& a : T.atoms) RT.add(to_std(R * to_vec(a.x)), a.c);
        auto b = bockstein_b(T).chain, rb = bockstein_b(RT).chain;
        ZeroChain moved(3, b.ambient, true);
        for (auto& a : b.atoms) moved.add(to_std(R * to_vec(a.x)), a.c);
        EXPECT_TRUE(moved.canonical().equals(rb));
        // lens coordinates: F_perp commutes with the block-diagonal rotation
        auto c = cyc_0(T), rc = cyc_0(RT);
        DiagonalExcisionMap f(3, 1);
        Mat RR = kron_identity(Mat::Identity(2, 2), 2);
        for (int j = 0; j < 2; ++j) RR.block(2 * j, 2 * j, 2, 2) = R;
        for (auto& a : c.atoms) {
            Vec img = RR * a.lens.rep;
            bool hit = false;
            for (auto& o : rc.atoms) hit = hit || LensOrbit::canonical(img, f.Dperp, 3).same_as(o.lens, f.Dperp);
            EXPECT_TRUE(hit);
        }
    }
}

// ---------------------------------------------------------------------------
// mass series for polyhedral cycles

TEST(MassSeries, ZeroCycleGivesZeros) {
    SimplicialChain R(2, Ambient::sphere(2), 1);
    MassSeriesOptions o;
    o.samples = 1000;
    o.i_max = 4;
    auto s = cyc_poly_mass_series(R, o);
    for (double m : s.mass) EXPECT_EQ(m, 0.0);
}

// Independent area: triangulate each arc-pair rectangle, push the vertices through a
// hand-written p = 2 map, and sum image triangle areas over cells beyond the cut.
TEST(MassSeries, AgreesWithMeshArea) {
    auto R = equatorial_polygon(2, 4);
    MassSeriesOptions o;
    o.samples = 400000;
    o.i_max = 4;
    o.level_grid = 16;
    auto s = cyc_poly_mass_series(R, o);

    auto g = [](const Vec& x) {
        Vec d = (x.head(3) - x.tail(3)) / std::sqrt(2.0);
        Vec out(6);
        out << d / d.norm(), 0.5 * (x.head(3) + x.tail(3));
        return out;
    };
    auto slerp = [](const Vec& a, const Vec& b, double u) {
        double th = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
        return Vec((std::sin((1 - u) * th) * a + std::sin(u * th) * b) / std::sin(th));
    };
    auto tri_area = [](const Vec& a, const Vec& b, const Vec& c) {
        Vec u = b - a, w = c - a;
        return 0.5 * std::sqrt(std::max(0.0, u.squaredNorm() * w.squaredNorm() - std::pow(u.dot(w), 2)));
    };
    const int N = 400;
    std::vector<double> mesh(o.i_max, 0.0);
    for (auto& A : R.simplices)
        for (auto& B : R.simplices) {
            std::vector<Vec> img((N + 1) * (N + 1));
            std::vector<double> dist((N + 1) * (N + 1));
            for (int a = 0; a <= N; ++a)
                for (int b = 0; b <= N; ++b) {
                    Vec x(6);
                    x << slerp(A.v[0], A.v[1], double(a) / N), slerp(B.v[0], B.v[1], double(b) / N);
                    x /= std::sqrt(2.0);
                    dist[a * (N + 1) + b] = ((x.head(3) - x.tail(3)) / std::sqrt(2.0)).norm();
                    if (dist[a * (N + 1) + b] > 1e-9) img[a * (N + 1) + b] = g(x);
                }
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b) {
                    int i00 = a * (N + 1) + b, i10 = i00 + N + 1, i01 = i00 + 1, i11 = i10 + 1;
                    double dmin = std::min({dist[i00], dist[i10], dist[i01], dist[i11]});
                    double dmax = std::max({dist[i00], dist[i10], dist[i01], dist[i11]});
                    if (dmin <= 1e-9) continue;
                    double area = tri_area(img[i00], img[i10], img[i11]) + tri_area(img[i00], img[i11], img[i01]);
                    for (int i = 1; i <= o.i_max; ++i) {
                        double L = 1.0 / i;
                        if (dmin >= L) mesh[i - 1] += 0.5 * area;
                        else if (dmax > L) mesh[i - 1] += 0.5 * area * (dmax - L) / (dmax - dmin);
                    }
                }
        }
    for (int i = 2; i <= o.i_max; ++i) EXPECT_NEAR(s.mass[i - 1], mesh[i - 1], 0.02 * mesh[i - 1]) << "i=" << i;
    EXPECT_TRUE(s.monotone);
}

TEST(MassSeries, DeterministicForFixedSeed) {
    auto R = equatorial_polygon(2, 8);
    MassSeriesOptions o;
    o.samples = 20000;
    o.i_max = 6;
    o.level_grid = 16;
    auto a = cyc_poly_mass_series(R, o);
    o.workers = 3;
    auto b = cyc_poly_mass_series(R, o);
    EXPECT_EQ(a.mass, b.mass);
    EXPECT_EQ(a.boundary_mass, b.boundary_mass);
}
