#pragma once

#include "modp/chains.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/maximum_weighted_matching.hpp>

#include <limits>
#include <map>
#include <unordered_map>

namespace modp {

/// dP + Q = S - T (mod p); cost = M(P) + M(Q).
struct FillingCertificate {
    SimplicialChain P;
    ZeroChain Q;
    double cost = 0;
};

enum class GroupKind { Drop, Boundary, Pair, Steiner };

/// One block of the unit partition: how a set of unit atoms is annihilated.
struct UnitGroup {
    GroupKind kind = GroupKind::Drop;
    std::vector<int> units;
    int node = -1;  // Steiner candidate index
    double cost = 0;
};

struct FlatResult {
    double value = 0;
    FillingCertificate certificate;
    std::vector<UnitGroup> groups;
    bool verified = false;
};

struct FlatOptions {
    int unit_cap = 60;
};

/// The combinatorial model shared by the solver and the oracle. The difference S - T is
/// split into signed unit atoms (an atom with residue c becomes min(c, p-c) units of the
/// lighter sign). A unit is dropped (cost 1), sent to the boundary (relative flavor,
/// cost = distance to the boundary), paired with an opposite-sign unit (cost = distance),
/// or annihilated with p - 1 same-sign units at a Steiner node chosen from the barycenters
/// of all <= p atom subsets and the atom positions (cost = sum of distances to the node).
struct FlatProblem {
    int p = 2;
    Ambient ambient;
    bool relative = false;
    ZeroChain difference;
    std::vector<Vec> unit_pos;
    std::vector<int> unit_sign;
    std::vector<int> unit_atom;
    std::vector<Vec> candidates;
    mutable std::map<std::vector<int>, std::pair<double, int>> steiner_cache;

    int size() const { return static_cast<int>(unit_pos.size()); }

    double dist(const Vec& a, const Vec& b) const { return ambient.distance(a, b); }

    bool boundary_allowed() const { return relative && ambient.has_boundary(); }

    double boundary_cost(int u) const {
        return boundary_allowed() ? std::max(0.0, ambient.boundary_distance(unit_pos[u]))
                                  : std::numeric_limits<double>::infinity();
    }

    /// Cheapest way to dispose of a unit on its own.
    double single_cost(int u) const { return std::min(1.0, boundary_cost(u)); }

    bool can_pair(int a, int b) const { return p == 2 || unit_sign[a] == -unit_sign[b]; }

    double pair_cost(int a, int b) const { return dist(unit_pos[a], unit_pos[b]); }

    /// Best Steiner node for p same-sign units.
    std::pair<double, int> steiner_cost(const std::vector<int>& units) const {
        std::vector<int> key;
        for (int u : units) key.push_back(unit_atom[u]);
        std::sort(key.begin(), key.end());
        auto it = steiner_cache.find(key);
        if (it != steiner_cache.end()) return it->second;
        double best = std::numeric_limits<double>::infinity();
        int arg = -1;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            double s = 0;
            for (int u : units) s += dist(unit_pos[u], candidates[c]);
            if (s < best - 1e-15) {
                best = s;
                arg = static_cast<int>(c);
            }
        }
        steiner_cache[key] = {best, arg};
        return {best, arg};
    }
};

namespace detail {
inline void subsets_upto(int n, int maxk, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (cur.size() >= 2) out.push_back(cur);
    if (static_cast<int>(cur.size()) == maxk) return;
    for (int i = start; i < n; ++i) {
        cur.push_back(i);
        subsets_upto(n, maxk, i + 1, cur, out);
        cur.pop_back();
    }
}
}  // namespace detail

inline FlatProblem make_flat_problem(const ZeroChain& S, const ZeroChain& T, int unit_cap) {
    if (S.p != T.p) throw DomainError("mismatched moduli");
    if (S.ambient != T.ambient) throw DomainError("mismatched ambients");
    if (S.relative != T.relative) throw DomainError("mismatched relative flags");
    FlatProblem pr;
    pr.p = S.p;
    pr.ambient = S.ambient;
    pr.relative = S.relative;
    pr.difference = (S - T).canonical();
    int units = pr.difference.units();
    if (units > unit_cap)
        throw DomainError("difference has " + std::to_string(units) + " units, above the cap of " +
                          std::to_string(unit_cap) + "; raise the cap or skip the oracle");
    const auto& atoms = pr.difference.atoms;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        int c = atoms[a].c;
        int sign = c <= pr.p - c ? 1 : -1;
        int n = weight(c, pr.p);
        for (int i = 0; i < n; ++i) {
            pr.unit_pos.push_back(to_vec(atoms[a].x));
            pr.unit_sign.push_back(sign);
            pr.unit_atom.push_back(static_cast<int>(a));
        }
    }
    if (pr.p > 2) {
        for (auto& a : atoms) pr.candidates.push_back(to_vec(a.x));
        std::vector<std::vector<int>> subs;
        std::vector<int> cur;
        detail::subsets_upto(static_cast<int>(atoms.size()), pr.p, 0, cur, subs);
        for (auto& s : subs) {
            Vec b = Vec::Zero(pr.ambient.coord_dim());
            for (int i : s) b += to_vec(atoms[i].x);
            b /= static_cast<double>(s.size());
            if (pr.ambient.kind == AmbientKind::Sphere) {
                if (b.norm() < 1e-12) continue;
                b.normalize();
            }
            pr.candidates.push_back(b);
        }
    }
    return pr;
}

inline double group_cost(const FlatProblem& pr, UnitGroup& g) {
    switch (g.kind) {
        case GroupKind::Drop: g.cost = 1.0; break;
        case GroupKind::Boundary: g.cost = pr.boundary_cost(g.units[0]); break;
        case GroupKind::Pair: g.cost = pr.pair_cost(g.units[0], g.units[1]); break;
        case GroupKind::Steiner: {
            auto [c, node] = pr.steiner_cost(g.units);
            g.cost = c;
            g.node = node;
            break;
        }
    }
    return g.cost;
}

inline UnitGroup single_group(const FlatProblem& pr, int u) {
    UnitGroup g;
    g.units = {u};
    g.kind = pr.boundary_cost(u) < 1.0 ? GroupKind::Boundary : GroupKind::Drop;
    group_cost(pr, g);
    return g;
}

/// Build the filling certificate for a unit partition and verify dP + Q = S - T.
inline FlatResult certify(const FlatProblem& pr, std::vector<UnitGroup> groups) {
    FlatResult r;
    r.groups = std::move(groups);
    SimplicialChain P(pr.p, pr.ambient, 1, pr.relative);
    ZeroChain Q(pr.p, pr.ambient, pr.relative);
    auto seg = [&](const Vec& from, const Vec& to, int c) {
        if (pr.dist(from, to) <= tol().merge) return;
        P.simplices.push_back({{from, to}, residue(c, pr.p)});
    };
    double total = 0;
    for (auto& g : r.groups) {
        total += g.cost;
        int s0 = pr.unit_sign[g.units[0]];
        const Vec& x0 = pr.unit_pos[g.units[0]];
        switch (g.kind) {
            case GroupKind::Drop: Q.add(to_std(x0), s0); break;
            case GroupKind::Boundary: {
                Vec b = x0;
                Vec dpart = pr.ambient.disk_part(x0);
                Vec dir = dpart.norm() > 1e-15 ? Vec(dpart.normalized()) : Vec(Vec::Unit(dpart.size(), 0));
                b.tail(dpart.size()) = dir;
                seg(b, x0, s0);
                break;
            }
            case GroupKind::Pair: seg(pr.unit_pos[g.units[1]], x0, s0); break;
            case GroupKind::Steiner:
                for (int u : g.units) seg(pr.candidates[g.node], pr.unit_pos[u], pr.unit_sign[u]);
                break;
        }
    }
    r.value = total;
    P.canonicalize();
    Q.canonicalize();
    ZeroChain lhs = Q;
    if (!P.simplices.empty()) lhs = lhs + to_zero_chain(boundary(P));
    r.verified = (lhs - pr.difference).canonical().empty();
    r.certificate.P = P;
    r.certificate.Q = Q;
    r.certificate.cost = (P.simplices.empty() ? 0.0 : P.mass()) + Q.mass();
    return r;
}

namespace detail {

/// Exact min-cost partition by memoized search over assigned-unit masks.
struct PartitionSearch {
    const FlatProblem& pr;
    int n;
    std::unordered_map<std::uint64_t, std::pair<double, UnitGroup>> memo;

    explicit PartitionSearch(const FlatProblem& p) : pr(p), n(p.size()) {}

    bool duplicate_of_earlier(std::uint64_t mask, int i, int j) const {
        // units j and j' (i < j' < j, unassigned) at the same atom are interchangeable
        for (int q = i + 1; q < j; ++q)
            if (!(mask >> q & 1) && pr.unit_atom[q] == pr.unit_atom[j] && pr.unit_sign[q] == pr.unit_sign[j])
                return true;
        return false;
    }

    double solve(std::uint64_t mask) {
        if (mask == (n == 64 ? ~0ULL : ((1ULL << n) - 1))) return 0;
        auto it = memo.find(mask);
        if (it != memo.end()) return it->second.first;
        int i = 0;
        while (mask >> i & 1) ++i;
        std::uint64_t mi = mask | (1ULL << i);
        UnitGroup best = single_group(pr, i);
        double bestv = best.cost + solve(mi);
        for (int j = i + 1; j < n; ++j) {
            if (mask >> j & 1 || !pr.can_pair(i, j) || duplicate_of_earlier(mask, i, j)) continue;
            double c = pr.pair_cost(i, j);
            if (c >= bestv) continue;
            double v = c + solve(mi | (1ULL << j));
            if (v < bestv - 1e-13) {
                bestv = v;
                best = UnitGroup{GroupKind::Pair, {i, j}, -1, c};
            }
        }
        if (pr.p > 2) {
            std::vector<int> pool;
            for (int j = i + 1; j < n; ++j)
                if (!(mask >> j & 1) && pr.unit_sign[j] == pr.unit_sign[i]) pool.push_back(j);
            std::vector<int> cur{i};
            std::set<std::vector<int>> seen;
            std::function<void(std::size_t)> rec = [&](std::size_t start) {
                if (static_cast<int>(cur.size()) == pr.p) {
                    std::vector<int> key;
                    for (int u : cur) key.push_back(pr.unit_atom[u]);
                    std::sort(key.begin(), key.end());
                    if (!seen.insert(key).second) return;
                    UnitGroup g{GroupKind::Steiner, cur, -1, 0};
                    double c = group_cost(pr, g);
                    if (c >= bestv) return;
                    std::uint64_t m2 = mask;
                    for (int u : cur) m2 |= 1ULL << u;
                    double v = c + solve(m2);
                    if (v < bestv - 1e-13) {
                        bestv = v;
                        best = g;
                    }
                    return;
                }
                for (std::size_t t = start; t < pool.size(); ++t) {
                    cur.push_back(pool[t]);
                    rec(t + 1);
                    cur.pop_back();
                }
            };
            rec(0);
        }
        memo[mask] = {bestv, best};
        return bestv;
    }

    std::vector<UnitGroup> groups() {
        std::vector<UnitGroup> out;
        std::uint64_t full = n == 64 ? ~0ULL : ((1ULL << n) - 1);
        std::uint64_t mask = 0;
        while (mask != full) {
            solve(mask);
            UnitGroup g = memo.at(mask).second;
            for (int u : g.units) mask |= 1ULL << u;
            out.push_back(g);
        }
        return out;
    }
};

/// p = 2: maximum-savings matching, saving(i, j) = single(i) + single(j) - pair(i, j).
inline std::vector<UnitGroup> matching_groups(const FlatProblem& pr) {
    int n = pr.size();
    if (n == 0) return {};
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS, boost::no_property,
                                        boost::property<boost::edge_weight_t, long long>>;
    Graph g(n);
    const double scale = 1e9;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double save = pr.single_cost(i) + pr.single_cost(j) - pr.pair_cost(i, j);
            long long w = std::llround(save * scale);
            if (w > 0) boost::add_edge(i, j, w, g);
        }
    std::vector<boost::graph_traits<Graph>::vertex_descriptor> mate(n);
    boost::maximum_weighted_matching(g, &mate[0]);
    std::vector<UnitGroup> out;
    for (int i = 0; i < n; ++i) {
        int m = static_cast<int>(mate[i]);
        if (m >= n || m < 0) {
            out.push_back(single_group(pr, i));
        } else if (m < n && m > i) {
            UnitGroup gr{GroupKind::Pair, {i, m}, -1, 0};
            group_cost(pr, gr);
            out.push_back(gr);
        }
    }
    return out;
}

}  // namespace detail

/// Exact mod-p flat distance between 0-chains, relative to the Steiner candidate set.
inline FlatResult flat_distance_0(const ZeroChain& S, const ZeroChain& T, const FlatOptions& opt = {}) {
    FlatProblem pr = make_flat_problem(S, T, std::min(opt.unit_cap, 64));
    std::vector<UnitGroup> groups;
    if (pr.p == 2) {
        groups = detail::matching_groups(pr);
    } else {
        detail::PartitionSearch search(pr);
        groups = search.groups();
    }
    return certify(pr, std::move(groups));
}

namespace detail {
struct BruteForce {
    const FlatProblem& pr;
    std::vector<int> used;
    std::vector<UnitGroup> cur, best_groups;
    double best = std::numeric_limits<double>::infinity();

    explicit BruteForce(const FlatProblem& p) : pr(p), used(p.size(), 0) {}

    void run(double acc) {
        int i = 0;
        while (i < pr.size() && used[i]) ++i;
        if (i == pr.size()) {
            if (acc < best) {
                best = acc;
                best_groups = cur;
            }
            return;
        }
        used[i] = 1;
        for (GroupKind k : {GroupKind::Drop, GroupKind::Boundary}) {
            if (k == GroupKind::Boundary && !pr.boundary_allowed()) continue;
            UnitGroup g{k, {i}, -1, 0};
            group_cost(pr, g);
            cur.push_back(g);
            run(acc + g.cost);
            cur.pop_back();
        }
        for (int j = i + 1; j < pr.size(); ++j) {
            if (used[j] || !pr.can_pair(i, j)) continue;
            used[j] = 1;
            UnitGroup g{GroupKind::Pair, {i, j}, -1, 0};
            group_cost(pr, g);
            cur.push_back(g);
            run(acc + g.cost);
            cur.pop_back();
            used[j] = 0;
        }
        if (pr.p > 2) {
            std::vector<int> members{i};
            std::function<void(int)> pick = [&](int start) {
                if (static_cast<int>(members.size()) == pr.p) {
                    UnitGroup g{GroupKind::Steiner, members, -1, 0};
                    group_cost(pr, g);
                    cur.push_back(g);
                    run(acc + g.cost);
                    cur.pop_back();
                    return;
                }
                for (int j = start; j < pr.size(); ++j) {
                    if (used[j] || pr.unit_sign[j] != pr.unit_sign[i]) continue;
                    used[j] = 1;
                    members.push_back(j);
                    pick(j + 1);
                    members.pop_back();
                    used[j] = 0;
                }
            };
            pick(i + 1);
        }
        used[i] = 0;
    }
};
}  // namespace detail

constexpr int kOracleUnitCap = 12;

/// Exhaustive search over every partition of the units into drops, boundary arcs,
/// pairs and Steiner groups.
inline FlatResult flat_oracle_0(const ZeroChain& S, const ZeroChain& T) {
    FlatProblem pr = make_flat_problem(S, T, kOracleUnitCap);
    detail::BruteForce bf(pr);
    bf.run(0);
    return certify(pr, bf.best_groups);
}

// ---------------------------------------------------------------------------

struct ConeResult {
    SimplicialChain P;
    double bound = 0;
    bool boundary_verified = false;
};

/// P = cone(apex, T); dP = T when T is a cycle, so M(P) bounds Fl(T, 0).
inline ConeResult cone_filling_upper_bound(const SimplicialChain& T, const Vec& apex) {
    if (T.k >= 1 && !boundary(T).is_zero()) throw DomainError("cone filling needs a cycle");
    ConeResult r;
    r.P = SimplicialChain(T.p, T.ambient, T.k + 1, T.relative);
    if (T.ambient.kind == AmbientKind::Sphere) r.P.ambient = Ambient::disk(T.ambient.dim + 1);
    for (auto& s : T.simplices) {
        std::vector<Vec> v{apex};
        v.insert(v.end(), s.v.begin(), s.v.end());
        if (flat_volume(v) <= tol().vol)
            throw DomainError("apex lies in the affine hull of a simplex; choose another apex");
        r.P.simplices.push_back({std::move(v), s.c});
    }
    r.P.canonicalize();
    if (r.P.simplices.empty()) {
        r.boundary_verified = T.is_zero();
        return r;
    }
    r.bound = r.P.mass();
    SimplicialChain Tc = T;
    Tc.ambient = r.P.ambient;
    r.boundary_verified = (boundary(r.P) - Tc).is_zero();
    return r;
}

}  // namespace modp
