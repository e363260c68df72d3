#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace lab {

using cplx = std::complex<double>;

// Seeded RNG stream. Derived streams (for parallel MC blocks or restarts)
// are obtained via derive(), which splits deterministically so that results
// do not depend on thread scheduling.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : eng_(seed), seed_(seed) {}

    RngStream derive(std::uint64_t block) const {
        // splitmix64-style mixing of (seed, block)
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (block + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return RngStream(z ^ (z >> 31));
    }

    double uniform() { return unif_(eng_); }
    double uniform(double a, double b) { return a + (b - a) * unif_(eng_); }

    double gaussian() { return norm_(eng_); }

    // standard complex Gaussian: E|g|^2 = 1, g = (g' + i g'')/sqrt(2)
    cplx gaussian_complex() {
        static constexpr double inv_sqrt2 = 0.70710678118654752440;
        return cplx(norm_(eng_) * inv_sqrt2, norm_(eng_) * inv_sqrt2);
    }

    int sign() { return unif_(eng_) < 0.5 ? -1 : 1; }

    cplx unit_phase() {
        double th = uniform(0.0, 2.0 * M_PI);
        return cplx(std::cos(th), std::sin(th));
    }

    std::uint64_t integer(std::uint64_t n) {
        std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
        return d(eng_);
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::uint64_t seed_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace lab
