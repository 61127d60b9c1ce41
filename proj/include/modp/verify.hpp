#pragma once

#include "modp/bockstein_cyc.hpp"
#include "modp/cellular_oracle.hpp"
#include "modp/cyclic_fourier.hpp"
#include "modp/flat_norm.hpp"
#include "modp/gluing.hpp"
#include "modp/io.hpp"
#include "modp/steenrod_planar.hpp"

#include <chrono>
#include <sstream>

namespace modp {

struct CriterionResult {
    int id = 0;
    std::string key;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0;
    double budget = 0;
    json data = json::object();

    json to_json() const {
        return {{"id", id},           {"key", key},     {"title", title},   {"pass", pass},
                {"detail", detail},   {"seconds", seconds}, {"budget_seconds", budget}, {"data", data}};
    }
};

namespace check {

inline std::string fmt(double v, int prec = 6) {
    std::ostringstream o;
    o.precision(prec);
    o << v;
    return o.str();
}

/// Unit square on S^1 and a rational triangle on S^1.
inline ExactZeroChain fig2_square() {
    ExactZeroChain T(2, Ambient::sphere(1));
    T.add({1, 0}, 1);
    T.add({0, 1}, 1);
    T.add({-1, 0}, 1);
    T.add({0, -1}, 1);
    return T;
}

inline ExactZeroChain fig2_triangle() {
    ExactZeroChain T(3, Ambient::sphere(1));
    T.add({1, 0}, 1);
    T.add({Rational(-3, 5), Rational(4, 5)}, 1);
    T.add({Rational(-3, 5), Rational(-4, 5)}, 1);
    return T;
}

inline CriterionResult fig2() {
    CriterionResult r{1, "fig2", "Bockstein barycenters on the square and triangle (exact)"};
    r.budget = 1;
    bool ok = true;
    std::ostringstream d;
    {
        auto T = fig2_square();
        auto b = bockstein_b(T);
        std::vector<std::vector<Rational>> expect;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                expect.push_back({(T.atoms[i].x[0] + T.atoms[j].x[0]) / 2, (T.atoms[i].x[1] + T.atoms[j].x[1]) / 2});
        bool six = b.terms.size() == 6;
        for (auto& t : b.terms) {
            six = six && t.c == 1;
            auto it = std::find(expect.begin(), expect.end(), t.x);
            six = six && it != expect.end();
            if (it != expect.end()) expect.erase(it);
        }
        six = six && expect.empty();
        // (13) and (24) meet at the origin: 1 + 1 = 0 mod 2 after merging
        ExactZeroChain merged(2, Ambient::disk(2), true);
        for (auto& t : b.terms) merged.atoms.push_back({t.x, t.c});
        merged.canonicalize();
        bool chain_ok = b.chain.equals(merged) && b.chain.atoms.size() == 4;
        ok = ok && six && chain_ok;
        d << "square p=2: " << b.terms.size() << " midpoint terms coeff 1 " << (six ? "ok" : "MISMATCH")
          << ", merged chain " << b.chain.atoms.size() << " atoms (origin cancels mod 2); ";
        r.data["square_terms"] = b.terms.size();
        r.data["square_chain_atoms"] = b.chain.atoms.size();
    }
    {
        auto T = fig2_triangle();
        auto b = bockstein_b(T);
        std::vector<std::pair<std::vector<Rational>, int>> expect;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j)
                    expect.push_back({{(2 * T.atoms[i].x[0] + T.atoms[j].x[0]) / 3,
                                       (2 * T.atoms[i].x[1] + T.atoms[j].x[1]) / 3},
                                      1});
        expect.push_back({{(T.atoms[0].x[0] + T.atoms[1].x[0] + T.atoms[2].x[0]) / 3,
                           (T.atoms[0].x[1] + T.atoms[1].x[1] + T.atoms[2].x[1]) / 3},
                          2});
        bool match = b.terms.size() == 7;
        for (auto& t : b.terms) {
            auto it = std::find(expect.begin(), expect.end(), std::pair{t.x, t.c});
            match = match && it != expect.end();
            if (it != expect.end()) expect.erase(it);
        }
        match = match && expect.empty() && b.chain.atoms.size() == 7;
        ok = ok && match;
        d << "triangle p=3: 6 trisection points coeff 1 + barycenter coeff 2 " << (match ? "ok" : "MISMATCH");
    }
    r.pass = ok;
    r.detail = d.str();
    return r;
}

inline CriterionResult fig3() {
    CriterionResult r{2, "fig3", "Cyclic product of the square"};
    r.budget = 1;
    auto T = fig2_square();
    auto c = cyc_0(T);
    bool ok = c.atoms.size() == 6;
    double worst = 0;
    for (auto& a : c.atoms) {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                std::vector<Rational> mid{(T.atoms[i].x[0] + T.atoms[j].x[0]) / 2, (T.atoms[i].x[1] + T.atoms[j].x[1]) / 2};
                if (mid != a.disk) continue;
                Vec dir(2);
                dir << (T.atoms[i].x[0] - T.atoms[j].x[0]).convert_to<double>(),
                    (T.atoms[i].x[1] - T.atoms[j].x[1]).convert_to<double>();
                best = std::min(best, 1 - std::abs(a.lens.rep.dot(dir.normalized())));
            }
        worst = std::max(worst, best);
        ok = ok && best < 1e-12 && a.c == 1;
    }
    auto b = bockstein_b(T);
    bool proj = c.disk_projection().equals(b.chain);
    r.pass = ok && proj;
    r.detail = std::to_string(c.atoms.size()) + " atoms (line, midpoint); max line error " + fmt(worst) +
               "; disk projection equals b exactly: " + (proj ? "yes" : "no");
    return r;
}

inline CriterionResult fourier() {
    CriterionResult r{3, "fourier", "Real DFT block diagonalization"};
    r.budget = 1;
    double worst_o = 0, worst_d = 0;
    for (int p : {2, 3, 5, 7}) {
        auto res = fourier_residuals(p, 2);
        worst_o = std::max(worst_o, res.orthogonality);
        worst_d = std::max(worst_d, res.diagonalization);
        r.data[std::to_string(p)] = {res.orthogonality, res.diagonalization};
    }
    r.pass = worst_o < 1e-12 && worst_d < 1e-12;
    r.detail = "max |FF^T - I| = " + fmt(worst_o) + ", max |M - F^T D F| = " + fmt(worst_d);
    return r;
}

inline CriterionResult jacobian(std::uint64_t seed) {
    CriterionResult r{4, "jacobian", "Jacobian split near the diagonal"};
    r.budget = 10;
    bool ok = true;
    double worst = 0;
    int cases = 0;
    for (int p : {2, 3})
        for (int n : {1, 2})
            for (double eps : {0.05, 0.1, 0.5}) {
                DiagonalExcisionMap f(p, n);
                std::mt19937_64 rng(mix_seed(seed, p * 100 + n * 10 + static_cast<int>(eps * 100)));
                for (int s = 0; s < 50; ++s) {
                    Vec v = f.point_at_distance(eps, random_unit(rng, n + 1), random_unit(rng, f.lens_dim()));
                    auto js = jacobian_split(f, v);
                    worst = std::max(worst, js.max_rel_error);
                    bool pattern = js.inv_eps_count == f.lens_dim() - 1 && js.inv_sqrtp_count == n + 1 &&
                                   js.zero_count == 1;
                    ok = ok && pattern && js.max_rel_error <= 1e-4;
                    ++cases;
                }
            }
    r.pass = ok;
    r.detail = std::to_string(cases) +
               " points; singular values 1/eps x((p-1)(n+1)-1), 1/sqrt(p) x(n+1), 0 x1 (the radial direction is "
               "killed by the normalization, so 1/eps appears one time fewer than (p-1)(n+1)); max rel error " +
               fmt(worst);
    return r;
}

/// Rational point of S^1 from the stereographic parameter t.
inline std::vector<double> rational_circle_point(int a, int b) {
    double t = static_cast<double>(a) / b;
    return {(1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)};
}

inline std::pair<ZeroChain, ZeroChain> random_flat_instance(std::mt19937_64& rng, int p, int mode, int max_units) {
    Ambient amb = mode == 0 ? Ambient::sphere(1) : mode == 3 ? Ambient::euclidean(2) : Ambient::disk(2);
    bool rel = mode == 2;
    ZeroChain S(p, amb, rel), T(p, amb, rel);
    std::uniform_int_distribution<int> atoms(3, 12), coef(1, p - 1), grid(-7, 7), tpar(-12, 12);
    int n = atoms(rng);
    int units = 0;
    for (int i = 0; i < n; ++i) {
        std::vector<double> x;
        if (mode == 0) {
            x = rational_circle_point(tpar(rng), 5);
        } else {
            do {
                x = {grid(rng) / 8.0, grid(rng) / 8.0};
            } while (x[0] * x[0] + x[1] * x[1] >= 1);
        }
        int c = coef(rng);
        if (units + weight(c, p) > max_units) break;
        units += weight(c, p);
        (rng() % 2 ? S : T).add(x, c);
    }
    return {S, T};
}

inline CriterionResult flat_oracle(std::uint64_t seed) {
    CriterionResult r{5, "flatnorm", "Flat norm solver against brute force"};
    r.budget = 120;
    std::mt19937_64 rng(mix_seed(seed, 5));
    int agree = 0, certified = 0, total = 500;
    double worst = 0;
    std::map<std::string, int> per_mode;
    for (int s = 0; s < total; ++s) {
        int p = s % 2 ? 3 : 2;
        int mode = (s / 2) % 4;
        auto [S, T] = random_flat_instance(rng, p, mode, 12);
        auto a = flat_distance_0(S, T);
        auto b = flat_oracle_0(S, T);
        double diff = std::abs(a.value - b.value);
        worst = std::max(worst, diff);
        if (diff <= 1e-9) ++agree;
        if (a.verified && a.certificate.cost <= a.value + 1e-9) ++certified;
        per_mode[to_string(S.ambient.kind) + (S.relative ? "-rel" : "")]++;
    }
    r.pass = agree == total && certified == total;
    r.detail = std::to_string(agree) + "/" + std::to_string(total) + " agree (max |diff| " + fmt(worst) + "), " +
               std::to_string(certified) + " certificates verified";
    for (auto& [k, v] : per_mode) r.data["instances"][k] = v;
    return r;
}

inline BaseChain random_base_chain(std::mt19937_64& rng, const CubicalFamily& fam) {
    BaseChain T;
    T.p = fam.p;
    std::uniform_real_distribution<double> U(0.0, 2 * fam.period);
    std::uniform_int_distribution<int> na(1, 3), coef(1, fam.p - 1);
    int n = na(rng);
    for (int i = 0; i < n; ++i) {
        double a = U(rng), b = U(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 1e-3) b = a + 0.5;
        T.arcs.push_back({a, b, coef(rng)});
    }
    return T;
}

inline CriterionResult gluing(std::uint64_t seed) {
    CriterionResult r{6, "gluing", "Standard gluing is a chain map"};
    r.budget = 60;
    bool ok = true;
    std::ostringstream d;
    for (auto fam : {torus_family(8, 12, 3), rp1_family(8, 4)}) {
        std::mt19937_64 rng(mix_seed(seed, fam.name == "torus" ? 61 : 62));
        int good = 0, bounded = 0;
        double worst = 0, worst_ratio = 0, C = gluing_constant(fam);
        for (int s = 0; s < 100; ++s) {
            BaseChain T = random_base_chain(rng, fam);
            if (!check_transversal(fam, T).transversal) T = perturb(T, mix_seed(seed, s), 1e-7, nullptr);
            auto cm = check_chain_map(fam, T, 1e-6);
            worst = std::max(worst, cm.max_vertex_error);
            if (cm.ok) ++good;
            auto g = standard_gluing(fam, T);
            if (g.mass_out <= C * g.mass_in + 1e-9) ++bounded;
            if (g.mass_in > 0) worst_ratio = std::max(worst_ratio, g.mass_out / g.mass_in);
        }
        ok = ok && good == 100 && bounded == 100;
        d << fam.name << " (p=" << fam.p << "): " << good << "/100 chain-map, max vertex error " << fmt(worst)
          << ", mass ratio <= " << fmt(worst_ratio) << " <= C = " << fmt(C) << "; ";
        r.data[fam.name] = {{"C", C}, {"max_ratio", worst_ratio}, {"max_vertex_error", worst}};
    }
    auto torus = standard_gluing(torus_family(8, 12, 3), BaseChain{3, {{0.1, 0.1 + 2 * M_PI, 1}}, {}});
    d << "torus fundamental cycle area " << fmt(torus.mass_out);
    r.pass = ok;
    r.detail = d.str();
    return r;
}

inline CriterionResult orbits() {
    CriterionResult r{7, "orbits", "Necklace counts and free orbits"};
    r.budget = 1;
    bool ok = true;
    for (int p : {2, 3, 5})
        for (int k = 1; k <= 6; ++k) {
            auto n = orbit_enumerate(k, p);
            long long total = 0;
            for (auto& x : n) total += x.orbit_size;
            long long kp = 1;
            for (int i = 0; i < p; ++i) kp *= k;
            ok = ok && static_cast<long long>(n.size()) == burnside_count(k, p) && total == kp;
        }
    std::string ms;
    for (int p : {2, 3, 5, 7, 11}) {
        auto f = count_free_orbits(p);
        ok = ok && f.is_minus_one;
        ms += "p=" + std::to_string(p) + ": m=" + std::to_string(f.m) + " ";
    }
    r.pass = ok;
    r.detail = "FKM counts equal Burnside for k<=6, p<=5; " + ms + "all = -1 mod p";
    return r;
}

inline CriterionResult cellular() {
    CriterionResult r{8, "cellular", "Cellular Bockstein"};
    r.budget = 5;
    bool ok = true;
    std::ostringstream d;
    for (int p : {2, 3, 5}) {
        auto X = mapping_cone_degree_p(p);
        auto s = bockstein_snake(X, 1, {1}, p, 7);
        bool one = s.value.size() == 1 && s.value[0] == 1 && s.lift_independent;
        auto L = lens_complex(p, 5);
        auto b1 = check_beta(L, 1, p);
        bool bb = true;
        for (int k = 0; k <= 5; ++k) bb = bb && check_beta(L, k, p).beta_beta_zero;
        for (int k = 0; k <= 2; ++k) bb = bb && check_beta(X, k, p).beta_beta_zero;
        ok = ok && one && b1.isomorphism && bb && dd_zero(L) && dd_zero(X);
        d << "p=" << p << ": beta(psi)(e2)=" << (s.value.empty() ? -1 : s.value[0])
          << ", H1->H2 iso " << (b1.isomorphism ? "yes" : "no") << ", beta^2=0 " << (bb ? "yes" : "no") << "; ";
    }
    r.pass = ok;
    r.detail = d.str();
    return r;
}

inline CriterionResult sweep() {
    CriterionResult r{9, "sweep", "Sweep count of b o g"};
    r.budget = 30;
    bool ok = true;
    std::ostringstream d;
    for (int p : {2, 3}) {
        auto s = evaluate_family_class(p);
        bool good = s.degree == -s.m && s.evaluation == 1 && s.coefficient_sum == s.m;
        ok = ok && good;
        d << "p=" << p << ": paths " << s.paths << ", degree " << s.degree << " = -(" << s.m << "), mod p "
          << s.evaluation << "; ";
        r.data[std::to_string(p)] = {{"degree", s.degree}, {"m", s.m}, {"evaluation", s.evaluation}};
    }
    auto z = evaluate_family_class(3, 10, 0.9, 0.3, true);
    ok = ok && z.degree == 0;
    r.pass = ok;
    r.detail = d.str() + "empty family 0";
    return r;
}

inline Subspace random_affine(std::mt19937_64& rng, int n, int k) {
    Mat B(n + 1, k + 1);
    for (int c = 0; c <= k; ++c) B.col(c) = gaussian_vec(rng, n + 1);
    Subspace V = Subspace::linear_span(B);
    Vec o = Vec::Zero(n + 1);
    if (k < n) {
        Vec g = gaussian_vec(rng, n + 1);
        g -= V.basis * (V.basis.transpose() * g);
        std::uniform_real_distribution<double> U(0.0, 0.8);
        o = g.normalized() * U(rng);
    }
    return Subspace::make(V.basis, o);
}

inline CriterionResult steenrod(std::uint64_t seed) {
    CriterionResult r{10, "steenrod", "Planar Steenrod geometry"};
    r.budget = 30;
    std::mt19937_64 rng(mix_seed(seed, 10));
    double worst_b = 0, worst_c = 0;
    int chords = 0, samples = 0, hits = 0;
    for (int n : {1, 2, 3})
        for (int k : {0, 1, 2}) {
            if (k > n) continue;
            for (int s = 0; s < 1000; ++s) {
                Subspace V = random_affine(rng, n, k);
                double rho = std::sqrt(1 - V.offset.squaredNorm());
                Vec x = V.offset + rho * (V.basis * random_unit(rng, k + 1));
                Vec y = V.offset + rho * (V.basis * random_unit(rng, k + 1));
                if ((x - y).norm() < 1e-6) continue;
                auto w = bisection_witness(x, y, V);
                worst_b = std::max({worst_b, w.orthogonality, w.plane_residual});
                auto ch = chord_through(w.midpoint, w.ell);
                worst_c = std::max({worst_c, ch.residual, std::abs(ch.x.norm() - 1), V.distance(ch.x)});
                ++chords;
            }
            for (int i : {0, 1, 2}) {
                if (k + i < 1) continue;
                Subspace V = random_affine(rng, n, k);
                auto fam = sq_planar(V, n, k, i);
                for (auto& smp : fam.sample(50, rng())) {
                    auto m = fam.member(smp.point);
                    ++samples;
                    if (m.member && std::abs(std::abs(m.ell.dot(smp.ell)) - 1) <= 1e-6 && smp.point.norm() <= 1 + 1e-12)
                        ++hits;
                }
            }
        }
    r.pass = worst_b < 1e-12 && worst_c < 1e-12 && hits == samples;
    r.detail = std::to_string(chords) + " chords, max bisection residual " + fmt(worst_b) +
               ", max chord residual " + fmt(worst_c) + "; sample->member " + std::to_string(hits) + "/" +
               std::to_string(samples);
    return r;
}

inline CriterionResult rank_lemma(std::uint64_t seed) {
    CriterionResult r{11, "rank", "Projection rank lemma"};
    r.budget = 5;
    std::mt19937_64 rng(mix_seed(seed, 11));
    int violations = 0, equal_ok = 0;
    for (int s = 0; s < 200; ++s) {
        int p = std::vector<int>{2, 3, 5}[s % 3];
        int m = 2 + static_cast<int>(rng() % 4);
        std::vector<Mat> bases;
        for (int j = 0; j < p; ++j) {
            int d = static_cast<int>(rng() % (m + 1));
            Mat B(m, d);
            for (int c = 0; c < d; ++c) B.col(c) = gaussian_vec(rng, m);
            bases.push_back(Subspace::linear_span(B).basis);
        }
        if (!rank_of_diagonal_projection(bases).bound_holds) ++violations;
        int d = 1 + static_cast<int>(rng() % m);
        Mat B(m, d);
        for (int c = 0; c < d; ++c) B.col(c) = gaussian_vec(rng, m);
        Mat Q = Subspace::linear_span(B).basis;
        auto eq = rank_of_diagonal_projection(std::vector<Mat>(p, Q));
        if (eq.rank == eq.bound && eq.rank == Q.cols()) ++equal_ok;
    }
    r.pass = violations == 0 && equal_ok == 200;
    r.detail = std::to_string(violations) + " violations in 200 tuples; equality for coincident subspaces " +
               std::to_string(equal_ok) + "/200";
    return r;
}

inline CriterionResult mass_series(std::uint64_t seed, long samples = 1000000) {
    CriterionResult r{12, "mass-series", "Diagonal excision mass series"};
    r.budget = 300;
    MassSeriesOptions o;
    o.samples = samples;
    o.seed = seed;
    o.i_max = 16;
    o.level_grid = 96;
    auto R = equatorial_polygon(2, 16);
    auto s = cyc_poly_mass_series(R, o);
    double bmin = std::numeric_limits<double>::infinity(), bmax = 0;
    for (int i = 4; i <= 16; ++i) {
        bmin = std::min(bmin, s.boundary_mass[i - 1]);
        bmax = std::max(bmax, s.boundary_mass[i - 1]);
    }
    bool stable = bmin > 0 && bmax / bmin < 1.5;
    r.pass = s.monotone && s.fit_r2 >= 0.9 && s.fit_exponent >= 1 && stable && std::isfinite(s.boundary_ratio_max);
    r.detail = "M_16 = " + fmt(s.mass.back()) + ", tail M_2i - M_i ~ i^-" + fmt(s.fit_exponent, 4) +
               " (R^2 " + fmt(s.fit_r2, 4) + "), C = max i(M_2i - M_i) = " + fmt(s.tail_constant, 4) +
               "; max B_i/M(R) = " + fmt(s.boundary_ratio_max, 4) + ", B spread over i>=4 " + fmt(bmax / bmin, 4);
    r.data = {{"mass", s.mass}, {"boundary_mass", s.boundary_mass}, {"seed", s.seed}, {"samples", s.samples},
              {"fit_exponent", s.fit_exponent}, {"fit_r2", s.fit_r2}, {"C", s.tail_constant}};
    return r;
}

inline SimplicialChain random_segments(std::mt19937_64& rng, int p, int count) {
    SimplicialChain T(p, Ambient::disk(2), 1);
    std::uniform_real_distribution<double> U(-0.9, 0.9);
    for (int i = 0; i < count; ++i) {
        Vec a(2), b(2);
        a << U(rng), U(rng);
        b << U(rng), U(rng);
        if ((a - b).norm() < 1e-3) continue;
        T.add({a, b}, 1);
    }
    return T.canonicalize();
}

inline std::vector<CellBalls> random_ball_complex(std::mt19937_64& rng) {
    // triangle: vertices 0..2, edges 3..5, face 6
    std::vector<CellBalls> cells(7);
    for (int v = 0; v < 3; ++v) cells[v].dim = 0;
    cells[3] = {1, {0, 1}, {}};
    cells[4] = {1, {1, 2}, {}};
    cells[5] = {1, {0, 2}, {}};
    cells[6] = {2, {3, 4, 5}, {}};
    // delta-admissible input for delta = 0.2: disjoint balls, radius sum <= 4 * 0.045 < delta
    std::uniform_real_distribution<double> U(-1.0, 1.0), R(0.005, 0.045);
    std::uniform_int_distribution<int> nb(0, 4);
    for (auto& c : cells) {
        int n = nb(rng);
        for (int tries = 0; static_cast<int>(c.balls.size()) < n && tries < 100; ++tries) {
            Vec x(2);
            x << U(rng), U(rng);
            GeneralizedBall B{x, R(rng), false};
            bool disjoint = true;
            for (auto& o : c.balls) disjoint = disjoint && (o.center - B.center).norm() > o.r + B.r;
            if (disjoint) c.balls.push_back(B);
        }
    }
    return cells;
}

inline CriterionResult localization(std::uint64_t seed) {
    CriterionResult r{13, "localization", "Coarea radius selection and doubling merge"};
    r.budget = 30;
    std::mt19937_64 rng(mix_seed(seed, 13));
    int coarea_ok = 0, scans = 0, doubling_ok = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int s = 0; s < 100; ++s) {
        std::vector<SimplicialChain> taus;
        for (int j = 0; j < 5; ++j) taus.push_back(random_segments(rng, 2, 1 + static_cast<int>(rng() % 4)));
        Vec c(2);
        c << U(rng) - 0.5, U(rng) - 0.5;
        double rad = 0.1 + 0.3 * U(rng);
        double sw = rad * (0.05 + 0.95 * U(rng));
        double lam = 0.05 + 0.9 * U(rng);
        auto res = coarea_select_radius(taus, {c, rad, false}, sw, lam);
        if (res.ok && res.ball.r >= rad && res.ball.r <= rad + sw) ++coarea_ok;
        if (res.path == "scan") ++scans;
        min_slack = std::min(min_slack, res.min_slack);
    }
    double ratio = 0;
    int growth_ok = 0, pool = 0;
    for (int s = 0; s < 100; ++s) {
        auto cells = random_ball_complex(rng);
        auto d = doubling_merge(cells, 0.2, 0.5);
        if (d.disjoint_doubles && d.nested && d.contains_inputs) ++doubling_ok;
        if (d.growth_bound) ++growth_ok;
        ratio = std::max(ratio, d.radius_sum_ratio);
        pool = std::max(pool, d.max_pool);
    }
    r.pass = coarea_ok == 100 && doubling_ok == 100 && growth_ok == 100;
    r.detail = "coarea certificates " + std::to_string(coarea_ok) + "/100 (" + std::to_string(scans) +
               " via direct scan, min slack " + fmt(min_slack) + "); doubling " + std::to_string(doubling_ok) +
               "/100; radius sum <= 2^(#W-1) x pooled radii in " + std::to_string(growth_ok) +
               "/100 (max #W " + std::to_string(pool) + ", max radius sum / delta " + fmt(ratio, 4) + ")";
    return r;
}

}  // namespace check

struct AcceptanceOptions {
    std::uint64_t seed = 7;
    std::vector<std::string> only;  // keys; empty = all
    long mass_samples = 1000000;
};

inline std::vector<std::string> criterion_keys() {
    return {"fig2",  "fig3",     "fourier",  "jacobian", "flatnorm",    "gluing",      "orbits",
            "cellular", "sweep", "steenrod", "rank",     "mass-series", "localization"};
}

inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
    using clock = std::chrono::steady_clock;
    std::vector<std::pair<std::string, std::function<CriterionResult()>>> all = {
        {"fig2", [] { return check::fig2(); }},
        {"fig3", [] { return check::fig3(); }},
        {"fourier", [] { return check::fourier(); }},
        {"jacobian", [&] { return check::jacobian(opt.seed); }},
        {"flatnorm", [&] { return check::flat_oracle(opt.seed); }},
        {"gluing", [&] { return check::gluing(opt.seed); }},
        {"orbits", [] { return check::orbits(); }},
        {"cellular", [] { return check::cellular(); }},
        {"sweep", [] { return check::sweep(); }},
        {"steenrod", [&] { return check::steenrod(opt.seed); }},
        {"rank", [&] { return check::rank_lemma(opt.seed); }},
        {"mass-series", [&] { return check::mass_series(opt.seed, opt.mass_samples); }},
        {"localization", [&] { return check::localization(opt.seed); }},
    };
    std::vector<CriterionResult> out;
    int id = 0;
    for (auto& [key, fn] : all) {
        ++id;
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), key) == opt.only.end()) continue;
        auto t0 = clock::now();
        CriterionResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.id = id;
            r.key = key;
            r.title = key;
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        if (r.budget > 0 && r.seconds > r.budget) {
            r.pass = false;
            r.detail += " [over time budget " + check::fmt(r.budget) + " s]";
        }
        out.push_back(r);
    }
    return out;
}

inline std::string format_line(const CriterionResult& r) {
    std::ostringstream o;
    o << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.title << " (" << check::fmt(r.seconds, 3)
      << " s): " << r.detail;
    return o.str();
}

}  // namespace modp
