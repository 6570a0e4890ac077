// Exact table of N_n(z) = #{reduced words of length n with abelianization z}
// for all n <= n_max, with the per-level aggregates every density series
// needs: gcd-class histogram, sum of N*||z||^2, and sum of N*gcd(z).
// Everything is exact (big integers / rationals); floating point appears
// only where a Gaussian density is compared against.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "fgd/detail/diamond.hpp"
#include "fgd/detail/nbdp.hpp"
#include "fgd/lattice.hpp"
#include "fgd/words.hpp"

namespace fgd {

namespace detail {

inline mpq_class make_fraction(const mpz_class& num, const mpz_class& den) {
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

}  // namespace detail

struct BuildOptions {
    int threads = 0;                              // 0 = hardware concurrency
    std::uint64_t memory_budget = 2ULL << 30;     // bytes; 0 = unchecked
    std::function<void(int, int)> progress;       // (level, n_max), optional
};

// Coarse footprint estimate used for the resource check before building.
inline std::uint64_t estimated_build_bytes(int k, int n_max) {
    const double limb_bytes = 8.0 + n_max * std::log2(2.0 * k - 1.0) / 16.0;
    std::uint64_t frontier = detail::NbWalkDp::estimate_bytes(k, n_max, limb_bytes);
    long double retained = 0;
    for (int n = 0; n <= n_max; ++n) {
        long double cells = 1;
        // parity diamond has roughly half the L1 ball
        for (int i = 0; i < k; ++i) cells *= (2.0L * n + 1) / (i + 1);
        retained += cells * (sizeof(mpz_class) + 8.0L + n * std::log2(2.0L * k - 1) / 16.0L);
    }
    return frontier + static_cast<std::uint64_t>(retained);
}

class CountTable {
public:
    static CountTable build(int k, int n_max, const BuildOptions& opts = {}) {
        detail::check_rank(k);
        if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
        if (opts.memory_budget != 0 && estimated_build_bytes(k, n_max) > opts.memory_budget)
            throw ResourceError("count table build exceeds the configured memory budget");

        CountTable t(k, n_max);
        detail::NbWalkDp dp(k, n_max);

        // level 0: the identity word
        {
            Level lvl(k, 0);
            lvl.marginal.resize(1);
            lvl.marginal[0] = 1;
            lvl.hist_infinite = 1;
            t.levels_.push_back(std::move(lvl));
        }
        for (int n = 1; n <= n_max; ++n) {
            dp.advance(opts.threads);
            Level lvl(k, n);
            lvl.marginal.resize(lvl.geom.size());
            lvl.hist.assign(static_cast<std::size_t>(n + 1), mpz_class(0));
            std::size_t idx = 0;
            dp.for_each_current([&](std::span<const std::int64_t> z, std::int64_t cell,
                                    std::int64_t) {
                const mpz_class& cnt = dp.marginal_at_cell(cell);
                mpz_class& slot = lvl.marginal[idx++];
                slot = cnt;
                if (sgn(cnt) == 0) return;
                std::uint64_t g = 0;
                std::uint64_t zz = 0;
                for (auto v : z) {
                    const std::uint64_t a = static_cast<std::uint64_t>(v < 0 ? -v : v);
                    g = std::gcd(g, a);
                    zz += a * a;
                }
                if (g == 0) {
                    lvl.hist_infinite += cnt;
                } else {
                    lvl.hist[g] += cnt;
                    mpz_addmul_ui(lvl.gcd_sum_num.get_mpz_t(), cnt.get_mpz_t(),
                                  static_cast<unsigned long>(g));
                }
                mpz_addmul_ui(lvl.moment2_num.get_mpz_t(), cnt.get_mpz_t(),
                              static_cast<unsigned long>(zz));
            });
            t.levels_.push_back(std::move(lvl));
            if (opts.progress) opts.progress(n, n_max);
        }
        return t;
    }

    int rank() const { return k_; }
    int n_max() const { return n_max_; }

    const mpz_class& sphere(int n) const {
        check_level(n);
        return spheres_[static_cast<std::size_t>(n)];
    }

    const mpz_class& count(int n, const ExponentVector& z) const {
        check_level(n);
        if (z.coords.size() != static_cast<std::size_t>(k_))
            throw std::invalid_argument("exponent vector rank mismatch");
        const Level& lvl = levels_[static_cast<std::size_t>(n)];
        if (!lvl.geom.contains(z.coords)) return zero_;
        return lvl.marginal[lvl.geom.index(z.coords)];
    }

    // p_n evaluated at the lattice point z (the distribution lives on
    // z/sqrt(n)): N_{n-1}(z)/(2 S(n-1)) + N_n(z)/(2 S(n)).
    mpq_class pn_value(int n, const ExponentVector& z) const {
        check_window(n);
        mpq_class q = detail::make_fraction(count(n - 1, z), 2 * sphere(n - 1));
        q += detail::make_fraction(count(n, z), 2 * sphere(n));
        return q;
    }

    // E ||z||^2 under the uniform measure on the sphere of radius n.
    mpq_class second_moment(int n) const {
        check_level(n);
        if (n < 1) throw std::invalid_argument("second moment needs n >= 1");
        return detail::make_fraction(levels_[static_cast<std::size_t>(n)].moment2_num, sphere(n));
    }

    // numerator of the spherical fraction for a union of gcd classes
    mpz_class spherical_hits(int n, const GcdClassSet& S) const {
        check_level(n);
        const Level& lvl = levels_[static_cast<std::size_t>(n)];
        mpz_class hits = 0;
        for (std::uint64_t t = 1; t < lvl.hist.size(); ++t)
            if (S.contains_finite(t)) hits += lvl.hist[t];
        if (S.contains_infinite) hits += lvl.hist_infinite;
        return hits;
    }

    // E gcd(z) with gcd(0) counted as 0 (the T' statistic).
    mpq_class expected_gcd_prime(int n) const {
        check_level(n);
        if (n < 1) throw std::invalid_argument("expected gcd needs n >= 1");
        return detail::make_fraction(levels_[static_cast<std::size_t>(n)].gcd_sum_num, sphere(n));
    }

    // sup over ||z||_1 <= n of | n^{k/2} p_n(z) - normal(z/sqrt n) |
    double llt_sup_error(int n, double sigma2) const;

    // total p_n mass at ||z/sqrt(n)||_2 >= c, exact
    mpq_class tail_mass(int n, double c) const {
        check_window(n);
        if (!(c > 0)) throw std::invalid_argument("c must be positive");
        const long double bound = static_cast<long double>(c) * c * n;
        mpq_class total;
        for (int lev = n - 1; lev <= n; ++lev) {
            const Level& lvl = levels_[static_cast<std::size_t>(lev)];
            const mpz_class den = 2 * sphere(lev);
            mpz_class num = 0;
            lvl.geom.for_each([&](std::span<const std::int64_t> z, std::size_t idx) {
                std::int64_t zz = 0;
                for (auto v : z) zz += v * v;
                if (static_cast<long double>(zz) >= bound) num += lvl.marginal[idx];
            });
            total += detail::make_fraction(num, den);
        }
        return total;
    }

    template <typename Fn>
    void for_each_marginal(int n, Fn&& fn) const {  // fn(z, const mpz_class&)
        check_level(n);
        const Level& lvl = levels_[static_cast<std::size_t>(n)];
        lvl.geom.for_each([&](std::span<const std::int64_t> z, std::size_t idx) {
            fn(z, lvl.marginal[idx]);
        });
    }

private:
    struct Level {
        Level(int k, int n) : geom(k, n) {}
        detail::ParityDiamond geom;
        std::vector<mpz_class> marginal;
        std::vector<mpz_class> hist;  // index t >= 1; gcd classes on this sphere
        mpz_class hist_infinite = 0;  // count at z = 0
        mpz_class moment2_num = 0;    // sum N_n(z) * ||z||^2
        mpz_class gcd_sum_num = 0;    // sum N_n(z) * gcd(z), gcd(0) := 0
    };

    CountTable(int k, int n_max) : k_(k), n_max_(n_max) {
        levels_.reserve(static_cast<std::size_t>(n_max + 1));
        spheres_.reserve(static_cast<std::size_t>(n_max + 1));
        for (int n = 0; n <= n_max; ++n) spheres_.push_back(sphere_size(k, n));
    }

    void check_level(int n) const {
        if (n < 0 || n > n_max_) throw std::out_of_range("level outside table");
    }
    void check_window(int n) const {
        if (n < 2 || n > n_max_) throw std::out_of_range("n must be in [2, n_max]");
    }

    int k_, n_max_;
    std::vector<Level> levels_;
    std::vector<mpz_class> spheres_;
    mpz_class zero_ = 0;
};

inline double default_sigma2(int k) { return 1.0 / (k - 1); }

// density of N(0, sigma2 * I_k) at x
inline double normal_density(int k, std::span<const double> x, double sigma2) {
    if (!(sigma2 > 0)) throw std::invalid_argument("sigma2 must be positive");
    if (x.size() != static_cast<std::size_t>(k))
        throw std::invalid_argument("dimension mismatch");
    double q = 0;
    for (double v : x) q += v * v;
    return std::pow(2 * std::numbers::pi * sigma2, -0.5 * k) * std::exp(-q / (2 * sigma2));
}

inline double CountTable::llt_sup_error(int n, double sigma2) const {
    check_window(n);
    if (!(sigma2 > 0)) throw std::invalid_argument("sigma2 must be positive");
    const double scale = std::pow(static_cast<double>(n), 0.5 * k_);
    const double root_n = std::sqrt(static_cast<double>(n));
    double sup = 0;
    std::vector<double> x(static_cast<std::size_t>(k_));
    for (int lev = n - 1; lev <= n; ++lev) {
        const Level& lvl = levels_[static_cast<std::size_t>(lev)];
        const double den = 2.0 * mpz_get_d(sphere(lev).get_mpz_t());
        lvl.geom.for_each([&](std::span<const std::int64_t> z, std::size_t idx) {
            const double pn = mpz_get_d(lvl.marginal[idx].get_mpz_t()) / den;
            for (int i = 0; i < k_; ++i)
                x[static_cast<std::size_t>(i)] =
                    static_cast<double>(z[static_cast<std::size_t>(i)]) / root_n;
            const double diff = std::abs(scale * pn - normal_density(k_, x, sigma2));
            if (diff > sup) sup = diff;
        });
    }
    return sup;
}

}  // namespace fgd
