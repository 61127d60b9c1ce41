#pragma once

#include "modp/bockstein_cyc.hpp"
#include "modp/chains.hpp"
#include "modp/gluing.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace modp {

using json = nlohmann::json;

inline constexpr const char* kToolName = "modp";
inline constexpr const char* kToolVersion = "0.1.0";

struct SchemaError : Error {
    using Error::Error;
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream o;
    o << std::hex;
    o.width(16);
    o.fill('0');
    o << v;
    return o.str();
}

inline json provenance(std::uint64_t seed, const json& config) {
    return {{"tool", kToolName}, {"version", kToolVersion}, {"seed", seed}, {"config_hash", hex64(fnv1a(config.dump()))}};
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t pos = std::min<std::size_t>(e.byte, text.size());
        int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
        throw SchemaError(path + ": line " + std::to_string(line) + ": " + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw SchemaError(path + ": cannot write");
    out << text;
}

namespace detail {
inline const json& field(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
    return j.at(key);
}

inline int int_field(const json& j, const std::string& key, const std::string& where) {
    const json& v = field(j, key, where);
    if (!v.is_number_integer()) throw SchemaError(where + "." + key + ": expected an integer");
    return v.get<int>();
}

inline double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw SchemaError(where + ": expected a number");
    return v.get<double>();
}

inline Rational rational(const json& v, const std::string& where) {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number_float()) return Rational(v.get<double>());
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        try {
            auto slash = s.find('/');
            if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
            return Rational(boost::multiprecision::cpp_int(s.substr(0, slash)),
                            boost::multiprecision::cpp_int(s.substr(slash + 1)));
        } catch (const std::exception&) {
            throw SchemaError(where + ": cannot parse rational '" + s + "'");
        }
    }
    throw SchemaError(where + ": expected a number or a rational string");
}
}  // namespace detail

inline json ambient_to_json(const Ambient& a) {
    json j{{"kind", to_string(a.kind)}, {"dim", a.dim}};
    if (a.kind == AmbientKind::Product) j["disk_dim"] = a.disk_dim;
    return j;
}

inline Ambient ambient_from_json(const json& j, const std::string& where) {
    std::string kind = detail::field(j, "kind", where).get<std::string>();
    int dim = detail::int_field(j, "dim", where);
    if (dim < 0) throw SchemaError(where + ".dim: must be nonnegative");
    if (kind == "sphere") return Ambient::sphere(dim);
    if (kind == "disk") return Ambient::disk(dim);
    if (kind == "euclidean") return Ambient::euclidean(dim);
    if (kind == "product") {
        int dd = detail::int_field(j, "disk_dim", where);
        return Ambient::product(dim - dd, dd);
    }
    throw SchemaError(where + ".kind: unknown ambient '" + kind + "'");
}

template <class S>
json zero_chain_to_json(const ZeroChainT<S>& z) {
    json atoms = json::array();
    for (auto& a : z.atoms) {
        json x = json::array();
        for (auto& v : a.x) {
            if constexpr (std::is_same_v<S, Rational>)
                x.push_back(v.str());
            else
                x.push_back(v);
        }
        atoms.push_back({{"x", x}, {"c", a.c}});
    }
    return {{"type", "zero_chain"}, {"p", z.p}, {"ambient", ambient_to_json(z.ambient)}, {"relative", z.relative},
            {"atoms", atoms}};
}

inline bool has_rational_strings(const json& j) {
    if (!j.contains("atoms")) return false;
    for (auto& a : j["atoms"])
        if (a.contains("x"))
            for (auto& v : a["x"])
                if (v.is_string()) return true;
    return false;
}

template <class S>
ZeroChainT<S> zero_chain_from_json(const json& j, const std::string& where = "chain") {
    int p = detail::int_field(j, "p", where);
    if (!is_prime(p)) throw SchemaError(where + ".p: " + std::to_string(p) + " is not prime");
    Ambient amb = ambient_from_json(detail::field(j, "ambient", where), where + ".ambient");
    bool rel = j.value("relative", false);
    ZeroChainT<S> z(p, amb, rel);
    const json& atoms = detail::field(j, "atoms", where);
    if (!atoms.is_array()) throw SchemaError(where + ".atoms: expected an array");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        std::string w = where + ".atoms[" + std::to_string(i) + "]";
        const json& xs = detail::field(atoms[i], "x", w);
        if (!xs.is_array() || static_cast<int>(xs.size()) != amb.coord_dim())
            throw SchemaError(w + ".x: expected " + std::to_string(amb.coord_dim()) + " coordinates");
        std::vector<S> x;
        for (std::size_t q = 0; q < xs.size(); ++q) {
            std::string wq = w + ".x[" + std::to_string(q) + "]";
            if constexpr (std::is_same_v<S, Rational>)
                x.push_back(detail::rational(xs[q], wq));
            else
                x.push_back(xs[q].is_string() ? detail::rational(xs[q], wq).template convert_to<double>()
                                              : detail::number(xs[q], wq));
        }
        z.add(x, detail::int_field(atoms[i], "c", w));
    }
    try {
        z.validate();
    } catch (const InvalidChain& e) {
        throw SchemaError(where + ": " + e.what());
    }
    return z;
}

inline json vec_json(const Vec& v) { return json(to_std(v)); }

inline json simplicial_to_json(const SimplicialChain& T) {
    json s = json::array();
    for (auto& sp : T.simplices) {
        json v = json::array();
        for (auto& x : sp.v) v.push_back(vec_json(x));
        s.push_back({{"verts", v}, {"c", sp.c}});
    }
    return {{"type", "simplicial_chain"}, {"p", T.p},        {"ambient", ambient_to_json(T.ambient)},
            {"k", T.k},                   {"relative", T.relative}, {"simplices", s}};
}

inline SimplicialChain simplicial_from_json(const json& j, const std::string& where = "chain") {
    int p = detail::int_field(j, "p", where);
    if (!is_prime(p)) throw SchemaError(where + ".p: " + std::to_string(p) + " is not prime");
    Ambient amb = ambient_from_json(detail::field(j, "ambient", where), where + ".ambient");
    int k = detail::int_field(j, "k", where);
    SimplicialChain T(p, amb, k, j.value("relative", false));
    const json& ss = detail::field(j, "simplices", where);
    for (std::size_t i = 0; i < ss.size(); ++i) {
        std::string w = where + ".simplices[" + std::to_string(i) + "]";
        const json& vs = ss[i].contains("v") ? ss[i]["v"] : detail::field(ss[i], "verts", w);
        if (!vs.is_array() || static_cast<int>(vs.size()) != k + 1)
            throw SchemaError(w + ".verts: expected " + std::to_string(k + 1) + " vertices");
        std::vector<Vec> verts;
        for (std::size_t q = 0; q < vs.size(); ++q) {
            if (!vs[q].is_array() || static_cast<int>(vs[q].size()) != amb.coord_dim())
                throw SchemaError(w + ".verts[" + std::to_string(q) + "]: expected " + std::to_string(amb.coord_dim()) +
                                  " coordinates");
            std::vector<double> x;
            for (auto& c : vs[q]) x.push_back(detail::number(c, w));
            verts.push_back(to_vec(x));
        }
        T.add(verts, detail::int_field(ss[i], "c", w));
    }
    try {
        T.validate();
    } catch (const InvalidChain& e) {
        throw SchemaError(where + ": " + e.what());
    }
    return T.canonicalize();
}

inline json motion_to_json(const Motion& m) {
    json j{{"kind", to_string(m.kind)}, {"rate", m.rate}};
    if (m.kind == MotionKind::Rotation) j["plane"] = {m.i, m.j};
    if (m.kind == MotionKind::Translation) j["direction"] = vec_json(m.direction);
    return j;
}

inline json family_to_json(const CubicalFamily& f) {
    json ms = json::array();
    for (auto& m : f.motions) ms.push_back(motion_to_json(m));
    return {{"type", "cubical_family"}, {"name", f.name},   {"p", f.p},
            {"ambient", ambient_to_json(f.ambient)}, {"period", f.period}, {"cells", f.cells},
            {"motions", ms},              {"model", simplicial_to_json(f.model)}};
}

inline CubicalFamily family_from_json(const json& j, const std::string& where = "family") {
    if (j.contains("preset")) {
        std::string p = j["preset"].get<std::string>();
        int cells = j.value("cells", 8);
        if (p == "torus") return torus_family(cells, j.value("fibre_vertices", 12), j.value("p", 2));
        if (p == "rp1") return rp1_family(cells, j.value("pieces", 4));
        throw SchemaError(where + ".preset: unknown family '" + p + "'");
    }
    CubicalFamily f;
    f.name = j.value("name", "custom");
    f.p = detail::int_field(j, "p", where);
    f.ambient = ambient_from_json(detail::field(j, "ambient", where), where + ".ambient");
    f.period = detail::number(detail::field(j, "period", where), where + ".period");
    f.cells = detail::int_field(j, "cells", where);
    if (f.cells < 1 || f.period <= 0) throw SchemaError(where + ": need cells >= 1 and period > 0");
    const json& ms = detail::field(j, "motions", where);
    for (std::size_t i = 0; i < ms.size(); ++i) {
        std::string w = where + ".motions[" + std::to_string(i) + "]";
        Motion m;
        std::string kind = detail::field(ms[i], "kind", w).get<std::string>();
        m.rate = ms[i].value("rate", 1.0);
        if (kind == "rotation") {
            m.kind = MotionKind::Rotation;
            auto pl = detail::field(ms[i], "plane", w);
            m.i = pl.at(0).get<int>();
            m.j = pl.at(1).get<int>();
            if (m.i == m.j || m.i < 0 || m.j < 0 || m.i >= f.ambient.coord_dim() || m.j >= f.ambient.coord_dim())
                throw SchemaError(w + ".plane: invalid coordinate pair");
        } else if (kind == "translation") {
            m.kind = MotionKind::Translation;
            std::vector<double> d = detail::field(ms[i], "direction", w).get<std::vector<double>>();
            if (static_cast<int>(d.size()) != f.ambient.coord_dim()) throw SchemaError(w + ".direction: wrong length");
            m.direction = to_vec(d);
        } else if (kind == "dilation") {
            m.kind = MotionKind::Dilation;
        } else {
            throw SchemaError(w + ".kind: unknown chart kind '" + kind + "'");
        }
        f.motions.push_back(m);
    }
    f.model = simplicial_from_json(detail::field(j, "model", where), where + ".model");
    if (f.model.ambient != f.ambient) throw SchemaError(where + ".model: ambient differs from the family");
    return f;
}

inline BaseChain base_chain_from_json(const json& j, const std::string& where = "chain") {
    BaseChain b;
    b.p = detail::int_field(j, "p", where);
    if (j.contains("arcs"))
        for (auto& a : j["arcs"]) {
            double lo = a.at(0).get<double>(), hi = a.at(1).get<double>();
            if (!(lo < hi)) throw SchemaError(where + ".arcs: need a < b");
            b.arcs.push_back({lo, hi, a.at(2).get<int>()});
        }
    if (j.contains("points"))
        for (auto& x : j["points"]) b.points.push_back({x.at(0).get<double>(), x.at(1).get<int>()});
    return b;
}

}  // namespace modp
