// Pullbacks of lattice predicates through abelianization: visibility of
// words, the rank-2 test-element classifier, exact spherical/annular/ball
// density series, proper-power counting, and the expected-gcd statistic.
#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "fgd/count_table.hpp"
#include "fgd/lattice.hpp"
#include "fgd/words.hpp"

namespace fgd {

inline bool is_visible_word(const Word& w) {
    return gcd_class(abelianize(w)) == GcdClass::finite(1);
}

inline bool is_t_visible_word(const Word& w, std::uint64_t t) {
    return is_t_visible(abelianize(w), t);
}

// A word is a test element of F_2 exactly when the abelianization of its
// primitive root has gcd class != 1 (with the zero vector in the infinite
// class).  Visible-root words lie in a proper cyclic retract; the verdict
// only depends on the root, hence on the conjugacy class and on powers.
struct TestElementVerdict {
    enum class Reason { root_visible, root_gcd_nontrivial, root_abelianization_zero };

    bool is_test = false;
    Reason reason = Reason::root_visible;
    Word root;
    int exponent = 1;
    GcdClass root_class = GcdClass::infinite();

    std::string reason_str() const {
        switch (reason) {
            case Reason::root_visible: return "root-visible";
            case Reason::root_gcd_nontrivial: return "root-gcd-nontrivial";
            default: return "root-abelianization-zero";
        }
    }
};

inline TestElementVerdict is_test_element_rank2(const Word& w) {
    if (w.rank() != 2) throw std::invalid_argument("test-element classifier is rank-2 only");
    if (w.is_identity()) throw std::invalid_argument("identity word is not classified");
    auto rp = w.primitive_root();
    TestElementVerdict v{false, TestElementVerdict::Reason::root_visible, std::move(rp.root),
                         rp.exponent, GcdClass::infinite()};
    v.root_class = gcd_class(abelianize(v.root));
    if (v.root_class.is_infinite()) {
        v.is_test = true;
        v.reason = TestElementVerdict::Reason::root_abelianization_zero;
    } else if (v.root_class.finite_value() >= 2) {
        v.is_test = true;
        v.reason = TestElementVerdict::Reason::root_gcd_nontrivial;
    }
    return v;
}

struct DensityBounds {
    double lower = 0;
    double upper = 1;
};

// Ball-density bounds from a strict annular density delta:
//   (4k-4)/(2k-1)^2 * delta  <=  liminf  <=  limsup  <=  1 - (4k-4)/(2k-1)^2 (1-delta)
inline DensityBounds compare_bounds(int k, double delta) {
    detail::check_rank(k);
    if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in [0,1]");
    const double c = (4.0 * k - 4.0) / ((2.0 * k - 1.0) * (2.0 * k - 1.0));
    return {c * delta, 1.0 - c * (1.0 - delta)};
}

// ---- structural counting of proper powers ------------------------------

inline int mobius(std::uint64_t m) {
    if (m == 0) throw std::invalid_argument("mobius(0)");
    int factors = 0;
    for (std::uint64_t p = 2; p * p <= m; ++p) {
        if (m % p) continue;
        m /= p;
        if (m % p == 0) return 0;
        ++factors;
    }
    if (m > 1) ++factors;
    return factors % 2 ? -1 : 1;
}

// #{cyclically reduced words of length L} = (2k-1)^L + k + (k-1)(-1)^L
inline mpz_class cyclically_reduced_count(int k, int L) {
    if (L < 1) throw std::invalid_argument("length must be >= 1");
    mpz_class s;
    mpz_ui_pow_ui(s.get_mpz_t(), static_cast<unsigned long>(2 * k - 1),
                  static_cast<unsigned long>(L));
    s += k;
    s += (L % 2 == 0) ? (k - 1) : -(k - 1);
    return s;
}

// cyclically reduced words that are not proper powers, via Mobius inversion
// of CR(L) = sum_{e | L} CRnp(L/e)
inline mpz_class primitive_core_count(int k, int L) {
    mpz_class s = 0;
    for (int d = 1; d <= L; ++d) {
        if (L % d) continue;
        const int mu = mobius(static_cast<std::uint64_t>(L / d));
        if (mu == 1) s += cyclically_reduced_count(k, d);
        else if (mu == -1) s -= cyclically_reduced_count(k, d);
    }
    return s;
}

// #{g : |g|=G, g c^e g^{-1} reduced as written} for a cyclically reduced
// core: the last letter of g avoids two distinct letters, the rest extend
// freely leftwards.
inline mpz_class conjugator_count(int k, int G) {
    if (G < 0) throw std::invalid_argument("negative conjugator length");
    if (G == 0) return 1;
    mpz_class s;
    mpz_ui_pow_ui(s.get_mpz_t(), static_cast<unsigned long>(2 * k - 1),
                  static_cast<unsigned long>(G - 1));
    return s * (2 * k - 2);
}

// A_e(n): words of length n that are exactly an e-th power of their
// primitive root.  Decomposition w = g c^e g^{-1} with c a primitive
// cyclically reduced core gives n = e|c| + 2|g|.
inline mpz_class root_power_sphere_count(int k, int n, int e) {
    if (n < 1 || e < 1) throw std::invalid_argument("n, e must be >= 1");
    mpz_class s = 0;
    for (int L = 1; L * e <= n; ++L) {
        const int rest = n - e * L;
        if (rest % 2) continue;
        s += primitive_core_count(k, L) * conjugator_count(k, rest / 2);
    }
    return s;
}

inline mpz_class proper_power_count(int k, int n) {
    detail::check_rank(k);
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    mpz_class s = 0;
    for (int e = 2; e <= n; ++e) s += root_power_sphere_count(k, n, e);
    return s;
}

// Per-length counts of visible cyclically reduced words (the cores of
// proper powers with visible primitive root).  Visible cores are never
// proper powers, so these need no Mobius correction.  Computed from a
// first-letter-fixed walk table; alphabet symmetries give the factor 2k.
inline std::vector<mpz_class> visible_core_counts(int k, int L_max, int threads = 0) {
    detail::check_rank(k);
    std::vector<mpz_class> out(static_cast<std::size_t>(std::max(L_max, 0) + 1));
    if (L_max < 1) return out;
    detail::NbWalkDp dp(k, L_max);
    dp.restrict_to_first_letter(Letter{1});
    const int inv_a1 = detail::inverse_index(k, 0);
    for (int L = 1; L <= L_max; ++L) {
        if (L > 1) dp.advance(threads);
        mpz_class sum = 0;
        dp.for_each_current([&](std::span<const std::int64_t> z, std::int64_t cell,
                                std::int64_t) {
            std::uint64_t g = 0;
            for (auto v : z) g = std::gcd(g, static_cast<std::uint64_t>(v < 0 ? -v : v));
            if (g != 1) return;
            // cyclically reduced with first letter a_1: last letter != a_1^{-1}
            sum += dp.marginal_at_cell(cell);
            sum -= dp.layer_at_cell(inv_a1, cell);
        });
        out[static_cast<std::size_t>(L)] = sum * (2 * k);
    }
    return out;
}

inline mpz_class proper_powers_with_visible_root(int k, int n,
                                                 std::span<const mpz_class> vis_cores) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (vis_cores.size() <= static_cast<std::size_t>(n / 2))
        throw std::invalid_argument("visible core counts cover lengths below n/2");
    mpz_class s = 0;
    for (int e = 2; e <= n; ++e)
        for (int L = 1; L * e <= n; ++L) {
            const int rest = n - e * L;
            if (rest % 2) continue;
            s += vis_cores[static_cast<std::size_t>(L)] * conjugator_count(k, rest / 2);
        }
    return s;
}

// ---- density series ----------------------------------------------------

struct DensityRow {
    int n = 0;
    mpz_class hits;                    // gamma(n, X)
    mpz_class total;                   // gamma(n, F)
    mpq_class spherical;               // hits / total
    std::optional<mpq_class> annular;  // (s(n-1) + s(n)) / 2, from n = 2
    mpz_class ball_hits;               // cumulative from n = 1 (identity excluded)
    mpz_class ball_total;
    mpq_class ball;                    // ball_hits / ball_total
};

struct DensitySeries {
    int k = 2;
    std::string target_description;
    double theoretical_annular = 0.0;
    std::vector<DensityRow> rows;  // rows[i] is n = i + 1
};

namespace detail {

template <typename HitsFn>
DensitySeries assemble_series(int k, int n_max, std::string description, double target,
                              const CountTable& table, HitsFn&& hits_at) {
    DensitySeries series;
    series.k = k;
    series.target_description = std::move(description);
    series.theoretical_annular = target;
    mpz_class cum_hits = 0, cum_total = 0;
    mpq_class prev_s;
    for (int n = 1; n <= n_max; ++n) {
        DensityRow row;
        row.n = n;
        row.hits = hits_at(n);
        row.total = table.sphere(n);
        row.spherical = make_fraction(row.hits, row.total);
        if (n >= 2) row.annular = (prev_s + row.spherical) / 2;
        cum_hits += row.hits;
        cum_total += row.total;
        row.ball_hits = cum_hits;
        row.ball_total = cum_total;
        row.ball = make_fraction(cum_hits, cum_total);
        prev_s = row.spherical;
        series.rows.push_back(std::move(row));
    }
    return series;
}

}  // namespace detail

inline DensitySeries spherical_series(const CountTable& table, const GcdClassSet& S, int n_max) {
    if (n_max > table.n_max()) throw std::out_of_range("table smaller than requested n_max");
    return detail::assemble_series(
        table.rank(), n_max, S.description, gcd_class_set_density(table.rank(), S, 1e-12), table,
        [&](int n) { return table.spherical_hits(n, S); });
}

// Exact test-element series: words whose abelianization has gcd != 1 minus
// the proper powers with visible primitive root (counted structurally).
inline DensitySeries test_element_series(const CountTable& table, int n_max, int threads = 0) {
    if (table.rank() != 2) throw std::invalid_argument("test-element series is rank-2 only");
    if (n_max > table.n_max()) throw std::out_of_range("table smaller than requested n_max");
    const auto cores = visible_core_counts(2, n_max / 2, threads);
    const auto image = GcdClassSet::nonunit_or_infinite();
    const double target = 1.0 - 6.0 / (std::numbers::pi * std::numbers::pi);
    return detail::assemble_series(2, n_max, "test-elements", target, table, [&](int n) {
        mpz_class hits = table.spherical_hits(n, image);
        hits -= proper_powers_with_visible_root(2, n, cores);
        return hits;
    });
}

// Brute-force test-element series by classifying every word on each sphere;
// the oracle for the structural route, so it stays far from the table code.
inline DensitySeries test_element_series_exact(int n_max) {
    if (n_max > 14) throw ResourceError("exact test-element enumeration is limited to n <= 14");
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    DensitySeries series;
    series.k = 2;
    series.target_description = "test-elements (enumerated)";
    series.theoretical_annular = 1.0 - 6.0 / (std::numbers::pi * std::numbers::pi);
    mpz_class cum_hits = 0, cum_total = 0;
    mpq_class prev_s;
    for (int n = 1; n <= n_max; ++n) {
        unsigned long hits = 0;
        enumerate_sphere(2, n, [&](std::span<const Letter> ls) {
            Word w = Word::from_reduced(2, std::vector<Letter>(ls.begin(), ls.end()));
            if (is_test_element_rank2(w).is_test) ++hits;
        });
        DensityRow row;
        row.n = n;
        row.hits = static_cast<long>(hits);
        row.total = sphere_size(2, n);
        row.spherical = detail::make_fraction(row.hits, row.total);
        if (n >= 2) row.annular = (prev_s + row.spherical) / 2;
        cum_hits += row.hits;
        cum_total += row.total;
        row.ball_hits = cum_hits;
        row.ball_total = cum_total;
        row.ball = detail::make_fraction(cum_hits, cum_total);
        prev_s = row.spherical;
        series.rows.push_back(std::move(row));
    }
    return series;
}

struct ExpectedGcdRow {
    int n = 0;
    mpq_class t_prime;                 // E gcd over the sphere of radius n
    std::optional<mpq_class> t_avg;    // (T'_{n-1} + T'_n)/2, with T'_0 = 0
};

inline std::vector<ExpectedGcdRow> expected_gcd_series(const CountTable& table, int n_max) {
    if (n_max > table.n_max()) throw std::out_of_range("table smaller than requested n_max");
    std::vector<ExpectedGcdRow> rows;
    mpq_class prev = 0;
    for (int n = 1; n <= n_max; ++n) {
        ExpectedGcdRow row;
        row.n = n;
        row.t_prime = table.expected_gcd_prime(n);
        row.t_avg = (prev + row.t_prime) / 2;
        prev = row.t_prime;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace fgd
