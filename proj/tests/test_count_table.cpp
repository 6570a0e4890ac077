#include <doctest.h>

#include "fgd/count_table.hpp"
#include "oracles.hpp"

using namespace fgd;

namespace {

const CountTable& table_2_32() {
    static CountTable t = CountTable::build(2, 32);
    return t;
}

ExponentVector ev(std::initializer_list<std::int64_t> cs) { return ExponentVector{cs}; }

}  // namespace

TEST_CASE("counts match hand values") {
    const auto& t = table_2_32();
    CHECK(t.count(2, ev({1, 1})) == 2);  // ab, ba
    CHECK(t.count(2, ev({0, 0})) == 0);  // would need xy with y = x^{-1}
    CHECK(t.count(3, ev({3, 0})) == 1);  // aaa
    CHECK(t.count(3, ev({5, 0})) == 0);  // outside support
    CHECK(t.count(3, ev({2, 0})) == 0);  // parity mismatch
}

TEST_CASE("table equals the enumeration histogram") {
    for (int k : {2, 3}) {
        const int n_top = k == 2 ? 8 : 5;
        auto t = CountTable::build(k, n_top);
        for (int n = 0; n <= n_top; ++n) {
            auto hist = oracles::sphere_histogram(k, n);
            std::size_t nonzero = 0;
            t.for_each_marginal(n, [&](std::span<const std::int64_t> z, const mpz_class& cnt) {
                if (sgn(cnt) == 0) return;
                ++nonzero;
                auto it = hist.find(std::vector<std::int64_t>(z.begin(), z.end()));
                REQUIRE(it != hist.end());
                REQUIRE(mpz_class(it->second) == cnt);
            });
            REQUIRE(nonzero == hist.size());
        }
    }
}

TEST_CASE("marginals sum to the sphere size") {
    const auto& t = table_2_32();
    for (int n = 0; n <= 32; ++n) {
        mpz_class sum = 0;
        t.for_each_marginal(n, [&](std::span<const std::int64_t>, const mpz_class& c) { sum += c; });
        CHECK(sum == t.sphere(n));
    }
}

TEST_CASE("p_n values") {
    const auto& t = table_2_32();
    CHECK(t.pn_value(2, ev({1, 1})) == mpq_class(1, 12));
    CHECK(t.pn_value(2, ev({1, 0})) == mpq_class(1, 8));
    CHECK(t.pn_value(5, ev({4, 3})) == 0);  // ||z||_1 > n
    CHECK_THROWS_AS(t.pn_value(1, ev({1, 0})), std::out_of_range);
    CHECK_THROWS_AS(t.pn_value(33, ev({1, 0})), std::out_of_range);
}

TEST_CASE("signed coordinate symmetry") {
    const auto& t = table_2_32();
    for (int n : {7, 10}) {
        t.for_each_marginal(n, [&](std::span<const std::int64_t> z, const mpz_class& c) {
            const std::int64_t a = z[0], b = z[1];
            CHECK(t.count(n, ev({-a, b})) == c);
            CHECK(t.count(n, ev({b, a})) == c);
            CHECK(t.count(n, ev({-b, -a})) == c);
        });
    }
}

TEST_CASE("second moment") {
    const auto& t = table_2_32();
    CHECK(t.second_moment(1) == 1);
    CHECK(t.second_moment(2) == mpq_class(8, 3));

    SUBCASE("matches the correlation closed form exactly") {
        for (int n = 1; n <= 32; ++n)
            CHECK(t.second_moment(n) == oracles::second_moment_closed_form(2, n));
        auto t3 = CountTable::build(3, 12);
        for (int n = 1; n <= 12; ++n)
            CHECK(t3.second_moment(n) == oracles::second_moment_closed_form(3, n));
    }

    SUBCASE("ratio is nondecreasing and bounded by k/(k-1)") {
        mpq_class prev = 0;
        for (int n = 1; n <= 32; ++n) {
            mpq_class ratio = t.second_moment(n) / n;
            CHECK(ratio >= prev);
            CHECK(ratio <= 2);
            prev = ratio;
        }
    }
}

TEST_CASE("normal density") {
    const std::vector<double> zero{0.0, 0.0}, e1{1.0, 0.0};
    CHECK(normal_density(2, zero, 1.0) == doctest::Approx(0.15915494309190).epsilon(1e-10));
    CHECK(normal_density(2, e1, 1.0) == doctest::Approx(0.09653235263005).epsilon(1e-10));
    CHECK_THROWS_AS(normal_density(2, zero, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(normal_density(2, zero, -1.0), std::invalid_argument);

    SUBCASE("integrates to one") {
        const double i2 = oracles::simpson_cube(2, 9.0, 60, [](std::span<const double> x) {
            return normal_density(2, x, 1.0);
        });
        CHECK(std::abs(i2 - 1.0) < 1e-6);
        const double i3 = oracles::simpson_cube(3, 8.0, 40, [](std::span<const double> x) {
            return normal_density(3, x, 0.5);
        });
        CHECK(std::abs(i3 - 1.0) < 1e-6);
    }
}

TEST_CASE("local limit error and tail mass") {
    auto t = CountTable::build(2, 65);
    const double e16 = t.llt_sup_error(16, 1.0);
    const double e64 = t.llt_sup_error(64, 1.0);
    CHECK(e16 >= 0);
    CHECK(e64 < e16);

    SUBCASE("tail mass") {
        const auto& t32 = table_2_32();
        CHECK(t32.tail_mass(10, 100.0) == 0);  // far beyond the support
        // a vanishing radius keeps everything except the origin
        ExponentVector origin{{0, 0}};
        CHECK(t32.tail_mass(10, 1e-9) == 1 - t32.pn_value(10, origin));
        CHECK(t32.tail_mass(20, 3.0).get_d() < 0.05);
        CHECK_THROWS_AS(t32.tail_mass(10, 0.0), std::invalid_argument);
    }
}

TEST_CASE("build validation") {
    CHECK_THROWS_AS(CountTable::build(2, 0), std::invalid_argument);
    BuildOptions tiny;
    tiny.memory_budget = 1024;
    CHECK_THROWS_AS(CountTable::build(2, 50, tiny), ResourceError);
    const auto& t = table_2_32();
    CHECK_THROWS_AS(t.count(2, ev({1, 1, 1})), std::invalid_argument);
    CHECK_THROWS_AS(t.second_moment(0), std::invalid_argument);
    CHECK_THROWS_AS(t.count(-1, ev({0, 0})), std::out_of_range);
    CHECK_THROWS_AS(t.llt_sup_error(1, 1.0), std::out_of_range);
    CHECK_THROWS_AS(t.llt_sup_error(10, 0.0), std::invalid_argument);
}
