#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace icp {

// splitmix64 step; used to derive independent seeds from (master, path...) so
// results never depend on how work is scheduled.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t p : path) s = splitmix64(s ^ p);
    return s;
}

// mt19937_64 wrapper with fully specified sampling. The standard library
// distributions are implementation defined, so uniform/normal draws are done
// by hand to keep streams identical across compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1]
    double uniform_pos() { return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53; }

    // standard normal, Box-Muller cosine branch (two draws per value, no cache)
    double normal() {
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // uniform integer in [0, n), rejection sampled
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = eng_();
        while (v >= limit) v = eng_();
        return v % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

} // namespace icp
