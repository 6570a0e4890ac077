// Test-only oracles, independent of the implementation paths they check:
// enumeration tallies, a closed-form second moment, chi-square thresholds,
// and plain quadrature.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "fgd/sampler.hpp"
#include "fgd/words.hpp"

namespace oracles {

using Histogram = std::map<std::vector<std::int64_t>, unsigned long>;

// histogram of abelianization over the full sphere, by brute enumeration
inline Histogram sphere_histogram(int k, int n) {
    Histogram h;
    fgd::enumerate_sphere(k, n, [&](std::span<const fgd::Letter> ls) {
        std::vector<std::int64_t> z(static_cast<std::size_t>(k), 0);
        for (auto l : ls) z[static_cast<std::size_t>(l.generator() - 1)] += l.sign();
        ++h[z];
    });
    return h;
}

// E ||z||^2 over the uniform sphere measure from letter correlations:
//   E <e(x_i), e(x_{i+d})> = (2k-1)^{-d}, so
//   E ||z_n||^2 = n + 2 sum_{d=1}^{n-1} (n-d) (2k-1)^{-d}.
inline mpq_class second_moment_closed_form(int k, int n) {
    mpq_class s = n;
    mpq_class qd = 1;
    const mpq_class q(1, 2 * k - 1);
    for (int d = 1; d <= n - 1; ++d) {
        qd *= q;
        s += 2 * (n - d) * qd;
    }
    return s;
}

// chi-square upper quantile via Wilson-Hilferty; z is the standard normal
// quantile at the same tail.
inline double chi_square_quantile(int dof, double z_tail) {
    const double a = 2.0 / (9.0 * dof);
    const double t = 1.0 - a + z_tail * std::sqrt(a);
    return dof * t * t * t;
}

constexpr double kNormalQuantile1e6 = 4.753424308822899;  // Phi^{-1}(1 - 1e-6)

// tensor-product Simpson quadrature of fn over [-half, half]^dim
template <typename Fn>
double simpson_cube(int dim, double half, int cells_per_axis, Fn&& fn) {
    const int m = cells_per_axis * 2;  // Simpson needs an even grid
    const double h = 2 * half / m;
    std::vector<double> w(static_cast<std::size_t>(m + 1));
    for (int i = 0; i <= m; ++i)
        w[static_cast<std::size_t>(i)] = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    std::vector<double> x(static_cast<std::size_t>(dim));
    double sum = 0;
    for (;;) {
        double weight = 1;
        for (int d = 0; d < dim; ++d) {
            weight *= w[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])];
            x[static_cast<std::size_t>(d)] = -half + h * idx[static_cast<std::size_t>(d)];
        }
        sum += weight * fn(std::span<const double>(x));
        int d = 0;
        while (d < dim && ++idx[static_cast<std::size_t>(d)] > m) {
            idx[static_cast<std::size_t>(d)] = 0;
            ++d;
        }
        if (d == dim) break;
    }
    return sum * std::pow(h / 3.0, dim);
}

// random reduced word of the given length, for property tests
inline fgd::Word random_word(int k, int len, fgd::SplitMix64& rng) {
    if (len == 0) return fgd::Word(k);
    return fgd::sample_sphere(k, len, rng);
}

}  // namespace oracles
