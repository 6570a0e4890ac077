// Uniform sampling on spheres of F_k by non-backtracking walks, the
// two-stage ball experiment, and Monte Carlo annular estimates.
//
// Reproducibility: every sample i draws from its own SplitMix64 substream
// keyed by (seed, i), so results are identical for any worker count.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgd/detail/parallel.hpp"
#include "fgd/words.hpp"

namespace fgd {

struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Debiased bounded draw (Lemire); exact uniformity on [0, m).
inline std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t m) {
    std::uint64_t x = rng.next();
    unsigned __int128 prod = static_cast<unsigned __int128>(x) * m;
    std::uint64_t lo = static_cast<std::uint64_t>(prod);
    if (lo < m) {
        const std::uint64_t t = (0 - m) % m;
        while (lo < t) {
            x = rng.next();
            prod = static_cast<unsigned __int128>(x) * m;
            lo = static_cast<std::uint64_t>(prod);
        }
    }
    return static_cast<std::uint64_t>(prod >> 64);
}

inline void sample_sphere_letters(int k, int n, SplitMix64& rng, std::vector<Letter>& out) {
    out.clear();
    out.reserve(static_cast<std::size_t>(n));
    if (n == 0) return;
    int idx = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(2 * k)));
    out.push_back(letter_at(k, idx));
    for (int i = 1; i < n; ++i) {
        const int banned = inverse_index(k, idx);
        int r = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(2 * k - 1)));
        if (r >= banned) ++r;
        idx = r;
        out.push_back(letter_at(k, idx));
    }
}

}  // namespace detail

inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64{detail::mix64(seed) ^
                      detail::mix64(index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL)};
}

// Exactly uniform over the sphere of radius n: first letter uniform over 2k,
// then uniform over the 2k-1 non-inverses at each step.
inline Word sample_sphere(int k, int n, SplitMix64& rng) {
    detail::check_rank(k);
    if (n < 1) throw std::invalid_argument("sphere sampling needs n >= 1");
    std::vector<Letter> ls;
    detail::sample_sphere_letters(k, n, rng, ls);
    return Word::from_reduced(k, std::move(ls));
}

// The two-stage ball experiment: m uniform on [0, n], then uniform on the
// m-sphere.  A word of length m has probability 1/((n+1) S(m)); this is
// deliberately not the uniform distribution on the ball.
inline Word sample_ball_experiment(int k, int n, SplitMix64& rng) {
    detail::check_rank(k);
    if (n < 0) throw std::invalid_argument("ball experiment needs n >= 0");
    const int m = static_cast<int>(detail::uniform_below(rng, static_cast<std::uint64_t>(n) + 1));
    if (m == 0) return Word(k);
    std::vector<Letter> ls;
    detail::sample_sphere_letters(k, m, rng, ls);
    return Word::from_reduced(k, std::move(ls));
}

struct SampleEstimate {
    double estimate = 0.0;
    std::uint64_t samples = 0;
    double standard_error = 0.0;
    std::string target;
    int n = 0;  // annular pair (n-1, n)
    std::uint64_t hits_low_sphere = 0;
    std::uint64_t hits_high_sphere = 0;
    std::uint64_t seed = 0;
};

// Unbiased Monte Carlo estimate of Q(n): half the samples on sphere n-1,
// half on sphere n, averaging the two frequencies.  The reported standard
// error is sqrt(p(1-p)/samples) at the pooled estimate.
inline SampleEstimate mc_annular_estimate(int k, int n,
                                          const std::function<bool(const Word&)>& predicate,
                                          std::uint64_t samples, std::uint64_t seed,
                                          int threads = 0, std::string target = {}) {
    detail::check_rank(k);
    if (n < 2) throw std::invalid_argument("annular estimate needs n >= 2");
    if (samples < 2 || samples % 2) throw std::invalid_argument("samples must be even and >= 2");

    const std::uint64_t half = samples / 2;
    const int T = detail::resolve_threads(threads);
    std::vector<std::uint64_t> low_parts(static_cast<std::size_t>(T), 0);
    std::vector<std::uint64_t> high_parts(static_cast<std::size_t>(T), 0);

    detail::parallel_chunks(T, T, [&](int t, int, int) {
        const std::uint64_t begin = samples * static_cast<std::uint64_t>(t) / T;
        const std::uint64_t end = samples * static_cast<std::uint64_t>(t + 1) / T;
        std::vector<Letter> buf;
        std::uint64_t lo = 0, hi = 0;
        for (std::uint64_t i = begin; i < end; ++i) {
            const int len = i < half ? n - 1 : n;
            SplitMix64 rng = substream(seed, i);
            detail::sample_sphere_letters(k, len, rng, buf);
            Word w = Word::from_reduced(k, buf);
            if (predicate(w)) (i < half ? lo : hi) += 1;
        }
        low_parts[static_cast<std::size_t>(t)] = lo;
        high_parts[static_cast<std::size_t>(t)] = hi;
    });

    SampleEstimate est;
    est.samples = samples;
    est.n = n;
    est.seed = seed;
    est.target = std::move(target);
    for (auto v : low_parts) est.hits_low_sphere += v;
    for (auto v : high_parts) est.hits_high_sphere += v;
    const double p1 = static_cast<double>(est.hits_low_sphere) / static_cast<double>(half);
    const double p2 = static_cast<double>(est.hits_high_sphere) / static_cast<double>(half);
    est.estimate = 0.5 * (p1 + p2);
    est.standard_error =
        std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(samples));
    return est;
}

}  // namespace fgd
