#include "modp/modp.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>

using namespace modp;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

/// Tolerance overrides never go below these.
constexpr double kFloorTau = 1e-12;
constexpr double kFloorMember = 1e-12;

double floored(double v, double floor, const char* name) {
    if (v < floor) {
        std::cerr << "note: " << name << " raised to its floor " << floor << "\n";
        return floor;
    }
    return v;
}

struct Out {
    std::string path = "-";
    std::uint64_t seed = 0;
    json config = json::object();

    void json_doc(json body) const {
        body["provenance"] = provenance(seed, config);
        write_text(path, body.dump(2) + "\n");
    }

    void csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) const {
        std::ostringstream o;
        json pv = provenance(seed, config);
        o << "# tool=" << pv["tool"].get<std::string>() << " version=" << pv["version"].get<std::string>()
          << " seed=" << seed << " config_hash=" << pv["config_hash"].get<std::string>() << "\n";
        for (std::size_t i = 0; i < header.size(); ++i) o << (i ? "," : "") << header[i];
        o << "\n";
        for (auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << r[i];
            o << "\n";
        }
        write_text(path, o.str());
    }
};

std::string num(double v) {
    std::ostringstream o;
    o << std::setprecision(17) << v;
    return o.str();
}

template <class S>
std::string num(const S& v) {
    if constexpr (std::is_same_v<S, Rational>)
        return v.str();
    else
        return num(static_cast<double>(v));
}

json certificate_json(const FlatResult& r) {
    json groups = json::array();
    for (auto& g : r.groups) {
        static const char* names[] = {"drop", "boundary", "pair", "steiner"};
        groups.push_back({{"kind", names[static_cast<int>(g.kind)]}, {"units", g.units}, {"cost", g.cost}});
    }
    return {{"P", simplicial_to_json(r.certificate.P)},
            {"Q", zero_chain_to_json(r.certificate.Q)},
            {"cost", r.certificate.cost},
            {"groups", groups}};
}

template <class S>
json bockstein_json(const BocksteinResultT<S>& b) {
    json terms = json::array();
    for (auto& t : b.terms) {
        json x = json::array();
        for (auto& v : t.x) {
            if constexpr (std::is_same_v<S, Rational>)
                x.push_back(v.str());
            else
                x.push_back(v);
        }
        terms.push_back({{"units", t.units}, {"x", x}, {"c", t.c}});
    }
    return {{"terms", terms}, {"chain", zero_chain_to_json(b.chain)},
            {"coefficient_sum_warning", b.coefficient_sum_warning}};
}

template <class S>
json cyc_json(const CycOutput0T<S>& c) {
    json atoms = json::array();
    for (auto& a : c.atoms) {
        json d = json::array();
        for (auto& v : a.disk) {
            if constexpr (std::is_same_v<S, Rational>)
                d.push_back(v.str());
            else
                d.push_back(v);
        }
        atoms.push_back({{"lens", vec_json(a.lens.rep)}, {"disk", d}, {"c", a.c}});
    }
    return {{"p", c.p}, {"n", c.n}, {"atoms", atoms}, {"disk_projection", zero_chain_to_json(c.disk_projection())}};
}

Subspace subspace_from_json(const json& j, int n) {
    const json& basis = detail::field(j, "basis", "sq");
    Mat B(n + 1, static_cast<int>(basis.size()));
    for (std::size_t c = 0; c < basis.size(); ++c) {
        auto v = basis[c].get<std::vector<double>>();
        if (static_cast<int>(v.size()) != n + 1) throw SchemaError("sq.basis: vectors must have n + 1 entries");
        B.col(static_cast<int>(c)) = to_vec(v);
    }
    Vec o = Vec::Zero(n + 1);
    if (j.contains("offset")) {
        auto v = j["offset"].get<std::vector<double>>();
        if (static_cast<int>(v.size()) != n + 1) throw SchemaError("sq.offset: must have n + 1 entries");
        o = to_vec(v);
    }
    return Subspace::make(B, o);
}

CellComplex complex_by_name(const std::string& name, int p, int top) {
    if (name == "lens") return lens_complex(p, top);
    if (name == "cone") return mapping_cone_degree_p(p);
    throw SchemaError("unknown complex '" + name + "' (lens, cone)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric mod-p cycle operations: flat norms, Bockstein and cyclic product maps, planar "
                 "Steenrod squares, gluing of families, and a cellular oracle."};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    Out out;
    app.add_option("-o,--out,--output", out.path, "Output file ('-' for stdout)");

    // flatnorm
    auto* flat = app.add_subcommand("flatnorm", "Mod-p flat distance between two 0-chains");
    std::string fS, fT, f_cert;
    bool f_oracle = false;
    int f_cap = 60;
    flat->add_option("a,--a", fS, "First 0-chain (JSON)")->required()->check(CLI::ExistingFile);
    flat->add_option("b,--b", fT, "Second 0-chain (JSON); empty chain when omitted")->check(CLI::ExistingFile);
    flat->add_flag("--oracle", f_oracle, "Also run the brute-force oracle (<= 12 units)");
    flat->add_option("--certificate", f_cert, "Write the filling certificate here");
    flat->add_option("--unit-cap", f_cap, "Reject instances above this many units")->check(CLI::Range(1, 64));

    // bockstein, cyc
    auto* bock = app.add_subcommand("bockstein", "Barycenter representative of the Bockstein on a 0-cycle");
    auto* cyc = app.add_subcommand("cyc", "Cyclic product map on a 0-cycle");
    std::string bIn;
    for (auto* sc : {bock, cyc})
        sc->add_option("in,--in", bIn, "0-cycle on a sphere (JSON)")->required()->check(CLI::ExistingFile);

    // cyc-mass
    auto* cmass = app.add_subcommand("cyc-mass", "Diagonal excision mass series of a polygonal 1-cycle on S^n (p = 2)");
    MassSeriesOptions mo;
    std::string m_in;
    int m_sides = 16;
    double m_samples = 1e6;
    cmass->add_option("in,--in", m_in, "1-cycle (simplicial JSON); equatorial polygon in S^2 when omitted")
        ->check(CLI::ExistingFile);
    cmass->add_option("--sides", m_sides, "Sides of the default equatorial polygon")->check(CLI::Range(3, 256));
    cmass->add_option("--imax", mo.i_max, "Largest index i")->check(CLI::Range(2, 64));
    cmass->add_option("--samples", m_samples, "Monte Carlo samples per index")->check(CLI::Range(1e3, 1e8));
    cmass->add_option("--seed", mo.seed, "Random seed");
    cmass->add_option("--workers", mo.workers, "Worker threads")->check(CLI::Range(1, 64));
    cmass->add_option("--level-grid", mo.level_grid, "Level-set grid resolution")->check(CLI::Range(8, 4096));
    cmass->add_option("--report", out.path, "Write the series report here");

    // sq
    auto* sq = app.add_subcommand("sq", "Planar Steenrod square family of V cap S^n (p = 2)");
    std::string sIn;
    int s_samples = 20, s_n = -1, s_k = -1, s_i = -1;
    std::uint64_t s_seed = 1;
    double s_eps = 1e-9;
    sq->add_option("plane,--plane", sIn, "JSON {basis: [[..]], offset: [..]} (n, k, i may be given here too)")
        ->required()
        ->check(CLI::ExistingFile);
    sq->add_option("--n", s_n, "Sphere dimension")->check(CLI::Range(0, 16));
    sq->add_option("--k", s_k, "Cycle dimension")->check(CLI::Range(0, 16));
    sq->add_option("--i", s_i, "Square index")->check(CLI::Range(0, 16));
    sq->add_option("--sample,--samples", s_samples, "Points sampled from the family")->check(CLI::Range(0, 1000000));
    sq->add_option("--seed", s_seed, "Random seed");
    sq->add_option("--member-eps", s_eps, "Membership tolerance");

    // coeff
    auto* coeff = app.add_subcommand("coeff", "Coefficients linking theta_j to P^i and beta P^i");
    int k_p = 3, k_n = 1, k_i = 0;
    coeff->add_option("--p", k_p, "Prime")->required();
    coeff->add_option("--n", k_n, "Sphere dimension")->check(CLI::NonNegativeNumber);
    coeff->add_option("--i", k_i, "Power index")->check(CLI::NonNegativeNumber);

    // fourier-check
    auto* four = app.add_subcommand("fourier-check", "Real DFT residuals and the Jacobian split of f");
    int q_p = 3, q_n = 1, q_points = 10;
    double q_eps = 0.1;
    std::uint64_t q_seed = 1;
    four->add_option("--p", q_p, "Prime")->required();
    four->add_option("--n", q_n, "Sphere dimension")->check(CLI::Range(0, 16));
    four->add_option("--eps", q_eps, "Diagonal distance for the Jacobian")->check(CLI::Range(1e-6, 1.0));
    four->add_option("--points", q_points, "Jacobian sample points")->check(CLI::Range(0, 100000));
    four->add_option("--seed", q_seed, "Random seed");

    // glue
    auto* glue = app.add_subcommand("glue", "Standard gluing of a family along a base chain");
    std::string gFam, gChain;
    bool g_perturb = false, g_check = false;
    double g_tau = 1e-6;
    std::uint64_t g_seed = 1;
    glue->add_option("family,--family", gFam, "Family JSON (or {\"preset\": \"torus\"|\"rp1\"})")
        ->required()
        ->check(CLI::ExistingFile);
    glue->add_option("chain,--chain", gChain, "Base chain JSON {p, arcs: [[a, b, c]], points: [[x, c]]}")
        ->required()
        ->check(CLI::ExistingFile);
    glue->add_flag("--check-boundary", g_check, "Verify that the boundary commutes with the gluing");
    glue->add_flag("--perturb", g_perturb, "Perturb into general position when needed");
    glue->add_option("--tau", g_tau, "Chain-map vertex tolerance");
    glue->add_option("--seed", g_seed, "Perturbation seed");

    // oracle
    auto* orc = app.add_subcommand("oracle", "Cellular homology and Bockstein checks");
    orc->require_subcommand(1);
    auto* o_lens = orc->add_subcommand("lens", "Homology of the lens complex");
    auto* o_cone = orc->add_subcommand("cone", "Homology of the degree-p mapping cone");
    auto* o_beta = orc->add_subcommand("bockstein-check", "Snake-lemma Bockstein and beta o beta = 0");
    auto* o_orb = orc->add_subcommand("orbits", "Necklace counts and free orbit counts");
    std::string o_name = "cone";
    int o_p = 3, o_top = 5, o_k = 6;
    for (auto* sc : {o_lens, o_cone, o_beta, o_orb}) sc->add_option("--p", o_p, "Prime")->required();
    for (auto* sc : {o_lens, o_beta}) sc->add_option("--dim", o_top, "Top dimension of the lens complex")->check(CLI::Range(1, 64));
    o_beta->add_option("--complex", o_name, "cone or lens")->check(CLI::IsMember({"cone", "lens"}));
    o_orb->add_option("--k", o_k, "Alphabet size")->check(CLI::Range(1, 12));

    // figures
    auto* fig = app.add_subcommand("figures", "Point data for the worked figures (CSV)");
    std::string which;
    int fg_p = 2, fg_i = 1, fg_samples = 400;
    std::uint64_t fg_seed = 1;
    std::string fg_in;
    fig->add_option("which", which, "fig2, fig3 or fig4")->required()->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
    fig->add_option("--p", fg_p, "Prime for fig2 (2 or 3)")->check(CLI::IsMember({2, 3}));
    fig->add_option("--in,--input", fg_in, "Override the input 0-cycle (fig2, fig3)")->check(CLI::ExistingFile);
    fig->add_option("--i", fg_i, "Square index for fig4")->check(CLI::Range(0, 4));
    fig->add_option("--samples", fg_samples, "Samples for fig4")->check(CLI::Range(1, 1000000));
    fig->add_option("--seed", fg_seed, "Random seed");

    // verify-all
    auto* ver = app.add_subcommand("verify-all", "Run every acceptance criterion");
    AcceptanceOptions ao;
    std::string v_json;
    bool v_timings = false;
    ver->add_option("--seed", ao.seed, "Random seed");
    ver->add_option("--only", ao.only, "Run only these criteria")->check(CLI::IsMember(criterion_keys()));
    ver->add_option("--mass-samples", ao.mass_samples, "Samples for the mass series")->check(CLI::Range(1000L, 100000000L));
    ver->add_option("--json", v_json, "Write a machine-readable report here");
    ver->add_flag("--timings", v_timings, "Include wall times in the JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*flat) {
            auto jS = read_json_file(fS);
            auto S = zero_chain_from_json<double>(jS, fS);
            ZeroChain T(S.p, S.ambient, S.relative);
            if (!fT.empty()) T = zero_chain_from_json<double>(read_json_file(fT), fT);
            out.config = {{"command", "flatnorm"}, {"S", jS}, {"unit_cap", f_cap}};
            auto r = flat_distance_0(S, T, FlatOptions{f_cap});
            json body{{"value", r.value}, {"verified", r.verified}, {"certificate", certificate_json(r)}};
            bool ok = r.verified;
            if (f_oracle) {
                auto b = flat_oracle_0(S, T);
                body["oracle_value"] = b.value;
                body["oracle_agrees"] = std::abs(b.value - r.value) <= 1e-9;
                ok = ok && body["oracle_agrees"].get<bool>();
            }
            if (!f_cert.empty()) {
                Out c = out;
                c.path = f_cert;
                c.json_doc(body["certificate"]);
            }
            out.json_doc(body);
            return ok ? kExitPass : kExitFail;
        }
        if (*bock || *cyc) {
            const std::string& path = bIn;
            json j = read_json_file(path);
            out.config = {{"command", *bock ? "bockstein" : "cyc"}, {"input", j}};
            bool exact = has_rational_strings(j);
            json body;
            if (*bock) {
                body = exact ? bockstein_json(bockstein_b(zero_chain_from_json<Rational>(j, path)))
                             : bockstein_json(bockstein_b(zero_chain_from_json<double>(j, path)));
            } else {
                body = exact ? cyc_json(cyc_0(zero_chain_from_json<Rational>(j, path)))
                             : cyc_json(cyc_0(zero_chain_from_json<double>(j, path)));
            }
            body["exact"] = exact;
            out.json_doc(body);
            return kExitPass;
        }
        if (*cmass) {
            mo.samples = std::lround(m_samples);
            out.seed = mo.seed;
            out.config = {{"command", "cyc-mass"}, {"imax", mo.i_max}, {"samples", mo.samples},
                          {"level_grid", mo.level_grid}};
            SimplicialChain R = equatorial_polygon(2, m_sides);
            if (!m_in.empty()) {
                json j = read_json_file(m_in);
                R = simplicial_from_json(j, m_in);
                out.config["input"] = j;
            } else {
                out.config["sides"] = m_sides;
            }
            auto s = cyc_poly_mass_series(R, mo);
            out.json_doc({{"index", s.index},
                          {"radii", s.radii},
                          {"mass", s.mass},
                          {"boundary_mass", s.boundary_mass},
                          {"mass_R", s.mass_R},
                          {"fit_exponent", s.fit_exponent},
                          {"fit_r2", s.fit_r2},
                          {"tail_constant", s.tail_constant},
                          {"boundary_ratio_max", s.boundary_ratio_max},
                          {"monotone", s.monotone},
                          {"samples", s.samples},
                          {"workers", s.workers}});
            return kExitPass;
        }
        if (*sq) {
            json j = read_json_file(sIn);
            int n = s_n >= 0 ? s_n : detail::int_field(j, "n", "sq");
            int k = s_k >= 0 ? s_k : detail::int_field(j, "k", "sq");
            int i = s_i >= 0 ? s_i : detail::int_field(j, "i", "sq");
            out.seed = s_seed;
            out.config = {{"command", "sq"}, {"input", j}, {"n", n}, {"k", k}, {"i", i}, {"samples", s_samples}};
            auto fam = sq_planar(subspace_from_json(j, n), n, k, i);
            double eps = floored(s_eps, kFloorMember, "--member-eps");
            json samples = json::array();
            std::vector<std::vector<std::string>> rows;
            int hits = 0;
            auto pts = fam.sample(s_samples, s_seed);
            for (auto& smp : pts) {
                auto m = fam.member(smp.point, eps);
                hits += m.member;
                samples.push_back({{"point", vec_json(smp.point)}, {"line", vec_json(smp.ell)}, {"member", m.member},
                                   {"residual", m.residual}});
                std::vector<std::string> r;
                for (int q = 0; q < smp.ell.size(); ++q) r.push_back(num(smp.ell[q]));
                for (int q = 0; q < smp.point.size(); ++q) r.push_back(num(smp.point[q]));
                r.push_back(m.member ? "1" : "0");
                rows.push_back(std::move(r));
            }
            bool all = hits == static_cast<int>(pts.size());
            if (out.path.size() > 4 && out.path.substr(out.path.size() - 4) == ".csv") {
                std::vector<std::string> header;
                for (int q = 0; q <= n; ++q) header.push_back("l" + std::to_string(q));
                for (int q = 0; q < fam.ambient_dim(); ++q) header.push_back("q" + std::to_string(q));
                header.push_back("member");
                out.csv(header, rows);
                return all ? kExitPass : kExitFail;
            }
            out.json_doc({{"ambient_dim", fam.ambient_dim()},
                          {"component_dim", fam.component_dim()},
                          {"empty", fam.empty},
                          {"samples", samples},
                          {"round_trip", hits}});
            return all ? kExitPass : kExitFail;
        }
        if (*coeff) {
            out.config = {{"command", "coeff"}, {"p", k_p}, {"n", k_n}, {"i", k_i}};
            auto [cP, cB] = steenrod_coefficient(k_p, k_n, k_i);
            out.json_doc({{"p", k_p}, {"n", k_n}, {"i", k_i}, {"c_P", cP}, {"c_betaP", cB}});
            return kExitPass;
        }
        if (*four) {
            out.seed = q_seed;
            out.config = {{"command", "fourier-check"}, {"p", q_p}, {"n", q_n}, {"eps", q_eps}, {"points", q_points}};
            require_prime(q_p);
            auto res = fourier_residuals(q_p, q_n);
            DiagonalExcisionMap f(q_p, q_n);
            std::mt19937_64 rng(q_seed);
            double worst = 0;
            bool pattern = true;
            json example;
            for (int s = 0; s < q_points; ++s) {
                Vec v = f.point_at_distance(q_eps, random_unit(rng, q_n + 1), random_unit(rng, f.lens_dim()));
                auto js = jacobian_split(f, v);
                worst = std::max(worst, js.max_rel_error);
                pattern = pattern && js.inv_eps_count == f.lens_dim() - 1 && js.inv_sqrtp_count == q_n + 1 &&
                          js.zero_count == 1;
                if (s == 0) example = {{"finite_difference", js.finite_difference}, {"expected", js.expected}};
            }
            bool ok = res.orthogonality < 1e-12 && res.diagonalization < 1e-12 && pattern && worst <= 1e-4;
            out.json_doc({{"orthogonality", res.orthogonality},
                          {"diagonalization", res.diagonalization},
                          {"jacobian_max_rel_error", worst},
                          {"jacobian_pattern", pattern},
                          {"jacobian_example", example},
                          {"pass", ok}});
            return ok ? kExitPass : kExitFail;
        }
        if (*glue) {
            json jf = read_json_file(gFam), jc = read_json_file(gChain);
            auto fam = family_from_json(jf, gFam);
            auto T = base_chain_from_json(jc, gChain);
            if (T.p != fam.p) throw SchemaError(gChain + ".p: differs from the family prime");
            out.seed = g_seed;
            out.config = {{"command", "glue"}, {"family", jf}, {"chain", jc}, {"perturb", g_perturb}};
            double tau = floored(g_tau, kFloorTau, "--tau");
            auto g = standard_gluing(fam, T, g_perturb, g_seed);
            BaseChain Tt = T;
            if (g_perturb && !check_transversal(fam, T).transversal) Tt = perturb(T, g_seed, 1e-7, nullptr);
            bool bounded = g.mass_out <= g.C * g.mass_in + 1e-9;
            json body{{"family", fam.name},
                      {"chain", simplicial_to_json(g.chain)},
                      {"mass_in", g.mass_in},
                      {"mass_out", g.mass_out},
                      {"C", g.C},
                      {"mass_bound_holds", bounded},
                      {"perturbation", g.transversality.perturbation}};
            bool ok = bounded;
            if (g_check) {
                auto cm = check_chain_map(fam, Tt, tau);
                body["boundary_commutes"] = cm.ok;
                body["boundary_max_vertex_error"] = cm.max_vertex_error;
                ok = ok && cm.ok;
            }
            out.json_doc(body);
            return ok ? kExitPass : kExitFail;
        }
        if (*orc) {
            require_prime(o_p);
            if (*o_orb) {
                out.config = {{"command", "oracle orbits"}, {"p", o_p}, {"k", o_k}};
                auto n = orbit_enumerate(o_k, o_p);
                auto f = count_free_orbits(o_p);
                bool ok = static_cast<long long>(n.size()) == burnside_count(o_k, o_p) && f.is_minus_one;
                out.json_doc({{"k", o_k},
                              {"p", o_p},
                              {"necklaces", n.size()},
                              {"burnside", burnside_count(o_k, o_p)},
                              {"free_orbits_m", f.m},
                              {"m_is_minus_one", f.is_minus_one}});
                return ok ? kExitPass : kExitFail;
            }
            if (*o_lens || *o_cone) {
                CellComplex X = *o_lens ? lens_complex(o_p, o_top) : mapping_cone_degree_p(o_p);
                out.config = {{"command", "oracle"}, {"complex", X.name}, {"p", o_p}, {"dim", o_top}};
                json H = json::array(), Hp = json::array();
                for (auto& h : integral_homology(X)) H.push_back(h.str());
                for (int k = 0; k <= X.top(); ++k) Hp.push_back(cohomology_dim_mod(X, k, o_p));
                out.json_doc({{"complex", X.name}, {"cells", X.cells}, {"dd_zero", dd_zero(X)},
                              {"integral_homology", H}, {"mod_p_cohomology_dims", Hp}});
                return dd_zero(X) ? kExitPass : kExitFail;
            }
            CellComplex X = complex_by_name(o_name, o_p, o_top);
            out.config = {{"command", "oracle bockstein-check"}, {"complex", X.name}, {"p", o_p}, {"dim", o_top}};
            auto bigs = [](const std::vector<BigInt>& v) {
                json a = json::array();
                for (auto& x : v) a.push_back(x.str());
                return a;
            };
            json checks = json::array();
            bool ok = true;
            for (int k = 0; k <= X.top(); ++k) {
                auto b = check_beta(X, k, o_p);
                ok = ok && b.beta_beta_zero;
                checks.push_back({{"degree", k}, {"dim_source", b.dim_source}, {"dim_target", b.dim_target},
                                  {"isomorphism", b.isomorphism}, {"beta_beta_zero", b.beta_beta_zero}});
            }
            // psi = the generator of H^1 (one 1-cell in both complexes)
            auto sn = bockstein_snake(X, 1, {1}, o_p, 7);
            bool one = sn.value.size() == 1 && sn.value[0] == 1 && sn.lift_independent;
            ok = ok && one && check_beta(X, 1, o_p).isomorphism;
            out.json_doc({{"complex", X.name},
                          {"psi", {1}},
                          {"lift", bigs(sn.lift)},
                          {"delta_lift", bigs(sn.delta_lift)},
                          {"beta_psi", sn.value},
                          {"beta_psi_second_lift", sn.value_second_lift},
                          {"lift_independent", sn.lift_independent},
                          {"beta", checks},
                          {"pass", ok}});
            return ok ? kExitPass : kExitFail;
        }
        if (*fig) {
            out.seed = fg_seed;
            out.config = {{"command", "figures"}, {"which", which}, {"p", fg_p}, {"i", fg_i}, {"samples", fg_samples}};
            std::vector<std::vector<std::string>> rows;
            if (which == "fig2" || which == "fig3") {
                ExactZeroChain T = which == "fig3" || fg_p == 2 ? check::fig2_square() : check::fig2_triangle();
                if (!fg_in.empty()) {
                    json j = read_json_file(fg_in);
                    T = zero_chain_from_json<Rational>(j, fg_in);
                    out.config["input"] = j;
                }
                for (auto& a : T.atoms) rows.push_back({"input", num(a.x[0]), num(a.x[1]), "", std::to_string(a.c)});
                if (which == "fig2") {
                    auto b = bockstein_b(T);
                    for (auto& t : b.chain.atoms)
                        rows.push_back({"output", num(t.x[0]), num(t.x[1]), "", std::to_string(t.c)});
                    out.csv({"role", "x", "y", "line_angle", "c"}, rows);
                } else {
                    auto c = cyc_0(T);
                    for (auto& a : c.atoms) {
                        double ang = std::atan2(a.lens.rep[1], a.lens.rep[0]);
                        if (ang < 0) ang += M_PI;
                        if (ang >= M_PI) ang -= M_PI;
                        rows.push_back({"output", num(a.disk[0]), num(a.disk[1]), num(ang), std::to_string(a.c)});
                    }
                    out.csv({"role", "x", "y", "line_angle", "c"}, rows);
                }
            } else {
                // V: the plane z = 0.3 in R^3, k = 1, n = 2
                Mat B(3, 2);
                B << 1, 0, 0, 1, 0, 0;
                Vec o(3);
                o << 0, 0, 0.3;
                auto fam = sq_planar(Subspace::make(B, o), 2, 1, fg_i);
                std::vector<std::string> header{"lx", "ly", "lz"};
                for (int q = 0; q < fam.ambient_dim(); ++q) header.push_back("q" + std::to_string(q));
                for (auto& s : fam.sample(fg_samples, fg_seed)) {
                    std::vector<std::string> r;
                    for (int q = 0; q < 3; ++q) r.push_back(num(s.ell[q]));
                    for (int q = 0; q < s.point.size(); ++q) r.push_back(num(s.point[q]));
                    rows.push_back(r);
                }
                out.csv(header, rows);
            }
            return kExitPass;
        }
        if (*ver) {
            auto results = run_acceptance(ao);
            bool all = true;
            json rep = json::array();
            for (auto& r : results) {
                std::cout << format_line(r) << "\n";
                all = all && r.pass;
                json j = r.to_json();
                if (!v_timings) {
                    j.erase("seconds");
                }
                rep.push_back(j);
            }
            std::cout << (all ? "ALL PASS" : "SOME CHECKS FAILED") << " (" << results.size() << " criteria, seed "
                      << ao.seed << ")\n";
            if (!v_json.empty()) {
                out.path = v_json;
                out.seed = ao.seed;
                out.config = {{"command", "verify-all"}, {"only", ao.only}, {"mass_samples", ao.mass_samples}};
                out.json_doc({{"criteria", rep}, {"all_pass", all}});
            }
            return all ? kExitPass : kExitFail;
        }
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const json::exception& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidChain& e) {
        std::cerr << "invalid chain: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
