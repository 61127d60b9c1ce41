#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace modp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Hard tolerance floors shared by every module.
struct Tolerances {
    double merge = 1e-9;
    double amb = 1e-9;
    double vol = 1e-12;
    double rel = 1e-6;
    double overlap = 1e-6;
    double eps_min = 1e-8;
};

inline const Tolerances& tol() {
    static const Tolerances t{};
    return t;
}

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidChain : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};

inline bool is_prime(long long p) {
    if (p < 2) return false;
    for (long long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

inline void require_prime(long long p) {
    if (!is_prime(p)) throw DomainError("modulus " + std::to_string(p) + " is not prime");
}

/// Residue of a in {0,...,p-1}.
inline int residue(long long a, int p) {
    long long r = a % p;
    return static_cast<int>(r < 0 ? r + p : r);
}

/// Mass weight |a| = min(a, p-a).
inline int weight(long long a, int p) {
    int r = residue(a, p);
    return r < p - r ? r : p - r;
}

inline long long powmod(long long b, long long e, long long m) {
    long long r = 1 % m;
    b = ((b % m) + m) % m;
    while (e > 0) {
        if (e & 1) r = static_cast<long long>((__int128)r * b % m);
        b = static_cast<long long>((__int128)b * b % m);
        e >>= 1;
    }
    return r;
}

inline int inverse_mod(int a, int p) {
    a = residue(a, p);
    if (a == 0) throw DomainError("zero has no inverse mod p");
    return static_cast<int>(powmod(a, p - 2, p));
}

/// Deterministic per-stratum seed (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stratum) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stratum + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Vec gaussian_vec(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = g(rng);
    return v;
}

inline Vec random_unit(std::mt19937_64& rng, int d) {
    Vec v = gaussian_vec(rng, d);
    while (v.norm() < 1e-12) v = gaussian_vec(rng, d);
    return v / v.norm();
}

inline Vec to_vec(const std::vector<double>& x) {
    return Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
}

inline std::vector<double> to_std(const Vec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

/// Lexicographic comparison with a tolerance on each coordinate.
inline int lex_compare(const Vec& a, const Vec& b, double eps) {
    for (Eigen::Index i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] < b[i] - eps) return -1;
        if (a[i] > b[i] + eps) return 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

}  // namespace modp
