// Acceptance suite: one pass/fail line per criterion, all tolerances pinned
// here.  Exit code is the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fgd/count_table.hpp"
#include "fgd/group_density.hpp"
#include "fgd/lattice.hpp"
#include "fgd/sampler.hpp"
#include "fgd/words.hpp"

using namespace fgd;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------

// 1. build_count_table equals the enumeration histogram: k=2 n<=10, k=3 n<=7.
void criterion_oracle_equivalence(const CountTable& t2) {
    bool ok = true;
    std::string detail;
    auto check_rank = [&](const CountTable& t, int k, int n_top) {
        for (int n = 0; n <= n_top && ok; ++n) {
            std::map<std::vector<std::int64_t>, unsigned long> hist;
            enumerate_sphere(k, n, [&](std::span<const Letter> ls) {
                std::vector<std::int64_t> z(static_cast<std::size_t>(k), 0);
                for (auto l : ls) z[static_cast<std::size_t>(l.generator() - 1)] += l.sign();
                ++hist[z];
            });
            std::size_t nonzero = 0;
            t.for_each_marginal(n, [&](std::span<const std::int64_t> z, const mpz_class& cnt) {
                if (sgn(cnt) == 0) return;
                ++nonzero;
                auto it = hist.find(std::vector<std::int64_t>(z.begin(), z.end()));
                if (it == hist.end() || mpz_class(it->second) != cnt) ok = false;
            });
            if (nonzero != hist.size()) ok = false;
            if (!ok) detail = "mismatch at k=" + std::to_string(k) + " n=" + std::to_string(n);
        }
    };
    check_rank(t2, 2, 10);
    auto t3 = CountTable::build(3, 7);
    check_rank(t3, 3, 7);
    if (ok) detail = "every entry equal, k=2 n<=10 and k=3 n<=7";
    report(1, "count table equals enumeration histogram", ok, detail);
}

// 2. L-inf ball densities against 1/(t^k zeta(k)).
void criterion_lattice_density() {
    auto c21 = count_in_ball(2, NormSelector::linf(), 1000, GcdClassSet::visible());
    const double e21 = std::abs(c21.density() - 6 / kPi2);
    auto c22 = count_in_ball(2, NormSelector::linf(), 1000, GcdClassSet::t_visible(2));
    const double e22 = std::abs(c22.density() - 1.0 / (4.0 * zeta2_exact()));
    auto c31 = count_in_ball(3, NormSelector::linf(), 200, GcdClassSet::visible());
    const double e31 = std::abs(c31.density() - 1.0 / zeta(3, 1e-12));
    const bool ok = e21 <= 5e-3 && e22 <= 5e-3 && e31 <= 1e-2;
    report(2, "visible and 2-visible lattice densities", ok,
           "errors " + fmt(e21) + ", " + fmt(e22) + ", " + fmt(e31) +
               " vs 5e-3, 5e-3, 1e-2");
}

// 3. even visible points at k=2, r=1000 vs 2/pi^2.
void criterion_even_visible() {
    auto ev = even_visible_density(1000);
    const double err = std::abs(ev.empirical.get_d() - 2 / kPi2);
    report(3, "even-visible density", err <= 5e-3, "error " + fmt(err) + " vs 5e-3");
}

// 4. unions of gcd classes.
void criterion_class_unions() {
    auto u12 = count_in_ball(2, NormSelector::linf(), 1000, GcdClassSet::finite_values({1, 2}));
    const double t12 = (1.0 + 0.25) / zeta2_exact();
    const double e12 = std::abs(u12.density() - t12);
    auto le50 = count_in_ball(2, NormSelector::linf(), 1000, GcdClassSet::all_up_to(50));
    double t50 = 0;  // 1 minus the tail over t > 50
    for (std::uint64_t t = 1; t <= 50; ++t) t50 += theoretical_density_Ut(2, t);
    const double e50 = std::abs(le50.density() - t50);
    const bool ok = e12 <= 5e-3 && e50 <= 1e-2;
    report(4, "gcd-class union densities", ok,
           "errors " + fmt(e12) + ", " + fmt(e50) + " vs 5e-3, 1e-2");
}

// 5. spherical densities 4/pi^2 (even) and 8/pi^2 (odd) with decreasing error.
void criterion_spherical(const DensitySeries& vis) {
    auto s = [&](int n) { return vis.rows[static_cast<std::size_t>(n - 1)].spherical.get_d(); };
    const double e200 = std::abs(s(200) - 4 / kPi2);
    const double e201 = std::abs(s(201) - 8 / kPi2);
    const double e50 = std::abs(s(50) - 4 / kPi2);
    const double e100 = std::abs(s(100) - 4 / kPi2);
    const bool ok = e200 <= 0.02 && e201 <= 0.02 && e50 > e100 && e100 > e200;
    report(5, "even/odd spherical densities", ok,
           "s(200) err " + fmt(e200) + ", s(201) err " + fmt(e201) + ", trend " + fmt(e50) +
               " > " + fmt(e100) + " > " + fmt(e200));
}

// 6. annular densities for visible and test elements with decreasing error.
void criterion_annular(const DensitySeries& vis, const DensitySeries& test) {
    auto qv = [&](int n) { return vis.rows[static_cast<std::size_t>(n - 1)].annular->get_d(); };
    auto qt = [&](int n) { return test.rows[static_cast<std::size_t>(n - 1)].annular->get_d(); };
    const double v50 = std::abs(qv(50) - 6 / kPi2);
    const double v100 = std::abs(qv(100) - 6 / kPi2);
    const double v200 = std::abs(qv(200) - 6 / kPi2);
    const double t50 = std::abs(qt(50) - (1 - 6 / kPi2));
    const double t100 = std::abs(qt(100) - (1 - 6 / kPi2));
    const double t200 = std::abs(qt(200) - (1 - 6 / kPi2));
    const bool ok = v200 <= 0.02 && t200 <= 0.02 && v50 > v100 && v100 > v200 && t50 > t100 &&
                    t100 > t200;
    report(6, "annular densities, visible and test", ok,
           "Q errors " + fmt(v200) + ", " + fmt(t200) + " vs 0.02; trends decreasing");
}

// 7. printed bounds 0.1742 and 0.7298, to one unit in the last place.
void criterion_bounds() {
    auto b = compare_bounds(2, 1 - 6 / kPi2);
    const bool ok = std::abs(b.lower - 0.1742) < 1e-4 && std::abs(b.upper - 0.7298) < 1e-4;
    report(7, "ball-density bounds decimals", ok,
           "lower " + fmt(b.lower) + ", upper " + fmt(b.upper));
}

// 8. local limit theorem: sup error strictly decreasing at 40/80/160 and the
//    second moment ratio at n=200 inside [1.9, 2.0].
void criterion_llt(const CountTable& t2) {
    const double s2 = default_sigma2(2);
    const double e40 = t2.llt_sup_error(40, s2);
    const double e80 = t2.llt_sup_error(80, s2);
    const double e160 = t2.llt_sup_error(160, s2);
    const double ratio = t2.second_moment(200).get_d() / 200.0;
    const bool ok = e40 > e80 && e80 > e160 && ratio >= 1.9 && ratio <= 2.0;
    report(8, "local limit theorem check", ok,
           "sup errors " + fmt(e40) + " > " + fmt(e80) + " > " + fmt(e160) +
               "; moment ratio " + fmt(ratio));
}

// 9. classifier vs hybrid series, plus invariance property tests.
void criterion_classifier(const CountTable& t2) {
    bool ok = true;
    std::string detail;
    auto hybrid = test_element_series(t2, 12);
    auto exact = test_element_series_exact(12);
    for (int n = 1; n <= 12 && ok; ++n) {
        if (!(hybrid.rows[static_cast<std::size_t>(n - 1)].hits ==
              exact.rows[static_cast<std::size_t>(n - 1)].hits)) {
            ok = false;
            detail = "series mismatch at n=" + std::to_string(n);
        }
    }
    // the length-2 verdict comes from the enumeration oracle
    unsigned long test_at_2 = 0;
    enumerate_sphere(2, 2, [&](std::span<const Letter> ls) {
        Word w = Word::from_reduced(2, std::vector<Letter>(ls.begin(), ls.end()));
        if (is_test_element_rank2(w).is_test) ++test_at_2;
    });
    if (test_at_2 != 0 || !(exact.rows[1].hits == 0)) {
        ok = false;
        detail = "length-2 verdict disagrees with enumeration";
    }
    int violations = 0;
    SplitMix64 rng{20240817};
    for (int rep = 0; rep < 10000; ++rep) {
        const int len = 1 + static_cast<int>(detail::uniform_below(rng, 14));
        Word w = sample_sphere(2, len, rng);
        Word g = sample_sphere(2, 1 + static_cast<int>(detail::uniform_below(rng, 8)), rng);
        const int m = 1 + static_cast<int>(detail::uniform_below(rng, 4));
        const bool base = is_test_element_rank2(w).is_test;
        if (is_test_element_rank2(w.conjugated_by(g)).is_test != base) ++violations;
        if (is_test_element_rank2(w.pow(m)).is_test != base) ++violations;
    }
    if (violations) {
        ok = false;
        detail = std::to_string(violations) + " invariance violations";
    }
    if (ok) detail = "exact match n<=12, n=2 verdict fixed, 0 violations in 10000 cases";
    report(9, "test-element classifier", ok, detail);
}

// 10. proper powers: n=4 equals enumeration; geometric decay on [4,14].
void criterion_proper_powers() {
    unsigned long enumerated = 0;
    enumerate_sphere(2, 4, [&](std::span<const Letter> ls) {
        Word w = Word::from_reduced(2, std::vector<Letter>(ls.begin(), ls.end()));
        if (w.primitive_root().exponent >= 2) ++enumerated;
    });
    bool ok = proper_power_count(2, 4) == mpz_class(enumerated);
    std::string detail = "count(4) = " + proper_power_count(2, 4).get_str() + " = enumeration";
    double prev_even = 1, prev_odd = 1;
    for (int n = 4; n <= 14; ++n) {
        const double f = mpz_get_d(proper_power_count(2, n).get_mpz_t()) /
                         mpz_get_d(sphere_size(2, n).get_mpz_t());
        double& prev = (n % 2 == 0) ? prev_even : prev_odd;
        if (n >= 6 && !(f < 0.6 * prev)) {
            ok = false;
            detail = "no geometric decay at n=" + std::to_string(n);
        }
        prev = f;
    }
    report(10, "proper power counts", ok, detail);
}

// 11. sampler: chi-square uniformity and MC agreement with the exact series.
void criterion_sampler(const DensitySeries& vis) {
    auto words = sphere_words(2, 3);
    std::map<std::string, int> counts;
    for (const auto& w : words) counts[w.str()] = 0;
    SplitMix64 rng{424242};
    for (int i = 0; i < 36000; ++i) ++counts[sample_sphere(2, 3, rng).str()];
    double chi2 = 0;
    for (auto& [w, c] : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
    const double threshold = 90.58;  // chi-square(35) upper quantile at 1e-6
    bool ok = counts.size() == 36 && chi2 < threshold;
    std::string detail = "chi2 " + fmt(chi2) + " < " + fmt(threshold);

    const double exact_q = vis.rows[199].annular->get_d();
    int within = 0;
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
        auto est = mc_annular_estimate(
            2, 200, [](const Word& w) { return is_visible_word(w); }, 1000000,
            static_cast<std::uint64_t>(rep + 1), 0, "visible");
        if (std::abs(est.estimate - exact_q) <= 4 * est.standard_error) ++within;
        if (rep % 20 == 19) std::fprintf(stderr, "  mc repetition %d/%d\n", rep + 1, reps);
    }
    ok = ok && within >= 99;
    detail += "; " + std::to_string(within) + "/100 runs within 4 SE";
    report(11, "sampler uniformity and MC agreement", ok, detail);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    std::fflush(stdout);

    BuildOptions opts;
    opts.memory_budget = 4ULL << 30;
    opts.progress = [](int level, int n_max) {
        if (level % 100 == 0 || level == n_max)
            std::fprintf(stderr, "  table level %d/%d\n", level, n_max);
    };
    const CountTable table2 = CountTable::build(2, 201, opts);
    const DensitySeries visible = spherical_series(table2, GcdClassSet::visible(), 201);
    const DensitySeries test = test_element_series(table2, 201);

    criterion_oracle_equivalence(table2);
    criterion_lattice_density();
    criterion_even_visible();
    criterion_class_unions();
    criterion_spherical(visible);
    criterion_annular(visible, test);
    criterion_bounds();
    criterion_llt(table2);
    criterion_classifier(table2);
    criterion_proper_powers();
    criterion_sampler(visible);

    if (g_failures == 0) std::printf("all criteria passed\n");
    else std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
