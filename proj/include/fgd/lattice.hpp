// Lattice side: gcd classes, visible / t-visible points, exact counts over
// L_p balls and scaled open regions, zeta evaluation, and the closed-form
// densities 1/(t^k zeta(k)).
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "fgd/detail/parallel.hpp"
#include "fgd/words.hpp"

namespace fgd {

// gcd of the coordinate absolute values; the zero vector gets the infinite
// class (gcd(0,0) = infinity convention), so every point has exactly one class.
class GcdClass {
public:
    static GcdClass infinite() { return GcdClass(0); }
    static GcdClass finite(std::uint64_t t) {
        if (t == 0) throw std::invalid_argument("finite gcd class must be positive");
        return GcdClass(t);
    }

    bool is_infinite() const { return v_ == 0; }
    std::uint64_t finite_value() const {
        if (is_infinite()) throw std::logic_error("infinite gcd class has no finite value");
        return v_;
    }
    bool operator==(const GcdClass&) const = default;

    std::string str() const { return is_infinite() ? "inf" : std::to_string(v_); }

private:
    explicit GcdClass(std::uint64_t v) : v_(v) {}
    std::uint64_t v_;  // 0 encodes infinity
};

inline GcdClass gcd_class(const ExponentVector& z) {
    std::uint64_t g = 0;
    for (auto c : z.coords)
        g = std::gcd(g, static_cast<std::uint64_t>(c < 0 ? -c : c));
    return g == 0 ? GcdClass::infinite() : GcdClass::finite(g);
}

inline bool is_t_visible(const ExponentVector& z, std::uint64_t t) {
    if (t == 0) throw std::invalid_argument("t must be >= 1");
    return gcd_class(z) == GcdClass::finite(t);
}

// A union of gcd-class orbits: membership over finite classes plus an
// explicit flag for the infinite class (the origin).  truncation_bound
// caps the index set when summing the closed-form class densities.
struct GcdClassSet {
    std::function<bool(std::uint64_t)> contains_finite;
    bool contains_infinite = false;
    std::uint64_t truncation_bound = std::numeric_limits<std::uint64_t>::max();
    std::string description;

    bool contains(GcdClass c) const {
        return c.is_infinite() ? contains_infinite : contains_finite(c.finite_value());
    }

    static GcdClassSet visible() {
        return {[](std::uint64_t t) { return t == 1; }, false, 1, "visible"};
    }
    static GcdClassSet t_visible(std::uint64_t t) {
        return {[t](std::uint64_t u) { return u == t; }, false, t,
                "t-visible:" + std::to_string(t)};
    }
    static GcdClassSet finite_values(std::vector<std::uint64_t> ts) {
        std::uint64_t mx = 0;
        for (auto t : ts) mx = std::max(mx, t);
        std::string d = "classes:";
        for (std::size_t i = 0; i < ts.size(); ++i)
            d += (i ? "," : "") + std::to_string(ts[i]);
        return {[ts = std::move(ts)](std::uint64_t u) {
                    return std::find(ts.begin(), ts.end(), u) != ts.end();
                },
                false, mx, d};
    }
    static GcdClassSet all_finite() {
        return {[](std::uint64_t) { return true; }, false,
                std::numeric_limits<std::uint64_t>::max(), "all-finite"};
    }
    static GcdClassSet all_up_to(std::uint64_t T) {
        return {[T](std::uint64_t u) { return u <= T; }, false, T,
                "all-le:" + std::to_string(T)};
    }
    static GcdClassSet empty() {
        return {[](std::uint64_t) { return false; }, false, 1, "empty"};
    }
    // Image of the rank-2 test elements: gcd >= 2 together with the origin.
    static GcdClassSet nonunit_or_infinite() {
        return {[](std::uint64_t t) { return t >= 2; }, true,
                std::numeric_limits<std::uint64_t>::max(), "test-image"};
    }
};

// zeta(k) by partial sum plus a trapezoid of the two integral tail bounds;
// the true tail lies between them, so the absolute error is below eps.
inline double zeta(int k, double eps) {
    if (k < 2) throw std::invalid_argument("zeta wants k >= 2");
    if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
    long double sum = 0.0L;
    std::uint64_t n = 0;
    for (;;) {
        ++n;
        sum += std::pow(static_cast<long double>(n), static_cast<long double>(-k));
        const long double hi = std::pow(static_cast<long double>(n), 1.0L - k) / (k - 1);
        const long double lo = std::pow(static_cast<long double>(n + 1), 1.0L - k) / (k - 1);
        if ((hi - lo) / 2 <= eps || n > 100'000'000ULL)
            return static_cast<double>(sum + (hi + lo) / 2);
    }
}

inline double zeta2_exact() { return std::numbers::pi * std::numbers::pi / 6.0; }

inline double theoretical_density_Ut(int k, std::uint64_t t) {
    if (k < 2) throw std::invalid_argument("k >= 2 required");
    if (t == 0) throw std::invalid_argument("t >= 1 required");
    const double z = k == 2 ? zeta2_exact() : zeta(k, 1e-13);
    const double tk = std::pow(static_cast<double>(t), k);
    return 1.0 / (tk * z);
}

// sum over t in the set of 1/(t^k zeta(k)), truncated once the remaining
// tail is provably below eps.
inline double gcd_class_set_density(int k, const GcdClassSet& S, double eps) {
    if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
    const double z = k == 2 ? zeta2_exact() : zeta(k, 1e-13);
    // tail over t > T is below T^{1-k}/((k-1) zeta(k))
    std::uint64_t T = 2;
    while (std::pow(static_cast<double>(T), 1.0 - k) / ((k - 1) * z) > eps && T < (1ULL << 40))
        T *= 2;
    T = std::min(T, S.truncation_bound);
    double sum = 0.0;
    for (std::uint64_t t = 1; t <= T; ++t)
        if (S.contains_finite(t)) sum += 1.0 / (std::pow(static_cast<double>(t), k) * z);
    return sum;
}

// L_p norm selector; 1, 2 and infinity are compared exactly in integers.
struct NormSelector {
    double p = std::numeric_limits<double>::infinity();
    static NormSelector linf() { return {}; }
    static NormSelector lp(double p) {
        if (!(p >= 1)) throw std::invalid_argument("p must be >= 1");
        return {p};
    }
    bool is_inf() const { return std::isinf(p); }
};

struct BallCount {
    std::uint64_t hits = 0;   // points whose gcd class lies in S
    std::uint64_t total = 0;  // all lattice points with ||z||_p <= r
    double density() const { return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0; }
};

namespace detail {

struct ScanBody {
    int k;
    std::int64_t R;
    const NormSelector* norm;
    double r;
    const GcdClassSet* S;

    bool norm_ok(std::span<const std::int64_t> z) const {
        if (norm->is_inf()) return true;  // box bound already enforces it
        if (norm->p == 1.0) {
            std::int64_t s = 0;
            for (auto c : z) s += c < 0 ? -c : c;
            return static_cast<long double>(s) <= static_cast<long double>(r);
        }
        if (norm->p == 2.0) {
            std::int64_t s = 0;
            for (auto c : z) s += c * c;
            return static_cast<long double>(s) <=
                   static_cast<long double>(r) * static_cast<long double>(r);
        }
        long double s = 0;
        for (auto c : z) s += std::pow(static_cast<long double>(c < 0 ? -c : c),
                                       static_cast<long double>(norm->p));
        return s <= std::pow(static_cast<long double>(r), static_cast<long double>(norm->p));
    }
};

}  // namespace detail

// Exact census of an L_p ball: direct scan of the bounding box with the gcd
// folded incrementally across coordinates.  This is deliberately the same
// code path the tests use as the brute-force oracle.
inline BallCount count_in_ball(int k, NormSelector norm, double r, const GcdClassSet& S,
                               int threads = 0, std::uint64_t max_points = 1ULL << 34) {
    detail::check_rank(k);
    if (!(r >= 1)) throw std::invalid_argument("radius must be >= 1");
    const std::int64_t R = static_cast<std::int64_t>(std::floor(r));
    const long double box = std::pow(static_cast<long double>(2 * R + 1), k);
    if (box > static_cast<long double>(max_points))
        throw ResourceError("lattice scan exceeds the configured point budget");

    detail::ScanBody body{k, R, &norm, r, &S};
    const int slices = static_cast<int>(2 * R + 1);
    std::vector<std::uint64_t> hits_part, total_part;
    detail::parallel_slices(slices, threads, hits_part, total_part,
        [&](int slice, std::uint64_t& hits, std::uint64_t& total) {
            std::vector<std::int64_t> z(static_cast<std::size_t>(k));
            z[0] = slice - R;
            auto rec = [&](auto&& self, int pos, std::uint64_t g) -> void {
                if (pos == k) {
                    if (!body.norm_ok(z)) return;
                    ++total;
                    const bool in =
                        g == 0 ? S.contains_infinite : S.contains_finite(g);
                    if (in) ++hits;
                    return;
                }
                for (std::int64_t v = -R; v <= R; ++v) {
                    z[static_cast<std::size_t>(pos)] = v;
                    self(self, pos + 1,
                         std::gcd(g, static_cast<std::uint64_t>(v < 0 ? -v : v)));
                }
            };
            rec(rec, 1, static_cast<std::uint64_t>(z[0] < 0 ? -z[0] : z[0]));
        });

    BallCount out;
    for (auto h : hits_part) out.hits += h;
    for (auto t : total_part) out.total += t;
    return out;
}

// Open axis-aligned box or open origin-centred L_p ball; the concrete
// instantiations of a "nice" region used by the density comparisons.
struct Region {
    enum class Kind { box, pball };
    Kind kind = Kind::pball;
    std::vector<double> lo, hi;  // box bounds
    double p = std::numeric_limits<double>::infinity();
    double radius = 1.0;

    static Region box(std::vector<double> lo, std::vector<double> hi) {
        if (lo.size() != hi.size() || lo.empty())
            throw std::invalid_argument("box bounds must have equal nonzero dimension");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i])) throw std::invalid_argument("box must be nonempty");
        return {Kind::box, std::move(lo), std::move(hi), 0.0, 0.0};
    }
    static Region lp_ball(double p, double radius) {
        if (!(p >= 1) && !std::isinf(p)) throw std::invalid_argument("p must be >= 1");
        if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
        Region reg;
        reg.kind = Kind::pball;
        reg.p = p;
        reg.radius = radius;
        return reg;
    }

    // Lebesgue measure; for L_p balls via (2r)^k Gamma(1+1/p)^k / Gamma(1+k/p).
    double lebesgue(int k) const {
        if (kind == Kind::box) {
            double v = 1;
            for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
            return v;
        }
        if (std::isinf(p)) return std::pow(2 * radius, k);
        const double g1 = std::tgamma(1.0 + 1.0 / p);
        const double gk = std::tgamma(1.0 + static_cast<double>(k) / p);
        return std::pow(2 * radius, k) * std::pow(g1, k) / gk;
    }
};

struct RegionCount {
    std::uint64_t points = 0;  // #(S \cap r*Omega), strict interior
    double mu = 0.0;           // points / r^k
    double expected = 0.0;     // density(S) * lambda(Omega)
};

namespace detail {

// smallest integer strictly greater than a / largest strictly less than b
inline std::int64_t first_above(double a) {
    return static_cast<std::int64_t>(std::floor(a)) + 1;
}
inline std::int64_t last_below(double b) {
    return static_cast<std::int64_t>(std::ceil(b)) - 1;
}

}  // namespace detail

inline RegionCount region_count(int k, const GcdClassSet& S, double r, const Region& region,
                                std::uint64_t max_points = 1ULL << 34) {
    detail::check_rank(k);
    if (!(r >= 1)) throw std::invalid_argument("scale must be >= 1");
    if (region.kind == Region::Kind::box &&
        region.lo.size() != static_cast<std::size_t>(k))
        throw std::invalid_argument("box dimension does not match k");

    std::vector<std::int64_t> lo(static_cast<std::size_t>(k)), hi(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const double a = region.kind == Region::Kind::box
                             ? r * region.lo[static_cast<std::size_t>(i)]
                             : -r * region.radius;
        const double b = region.kind == Region::Kind::box
                             ? r * region.hi[static_cast<std::size_t>(i)]
                             : r * region.radius;
        lo[static_cast<std::size_t>(i)] = detail::first_above(a);
        hi[static_cast<std::size_t>(i)] = detail::last_below(b);
    }
    long double cells = 1;
    for (int i = 0; i < k; ++i)
        cells *= std::max<std::int64_t>(0, hi[static_cast<std::size_t>(i)] -
                                               lo[static_cast<std::size_t>(i)] + 1);
    if (cells > static_cast<long double>(max_points))
        throw ResourceError("region scan exceeds the configured point budget");

    const long double rad = static_cast<long double>(r) * region.radius;
    std::uint64_t points = 0;
    std::vector<std::int64_t> z(static_cast<std::size_t>(k));
    auto rec = [&](auto&& self, int pos, std::uint64_t g) -> void {
        if (pos == k) {
            if (region.kind == Region::Kind::pball && !std::isinf(region.p)) {
                long double s = 0;
                if (region.p == 1.0) {
                    for (auto c : z) s += c < 0 ? -c : c;
                    if (!(s < rad)) return;
                } else if (region.p == 2.0) {
                    for (auto c : z) s += static_cast<long double>(c) * c;
                    if (!(s < rad * rad)) return;
                } else {
                    for (auto c : z)
                        s += std::pow(static_cast<long double>(c < 0 ? -c : c),
                                      static_cast<long double>(region.p));
                    if (!(s < std::pow(rad, static_cast<long double>(region.p)))) return;
                }
            }
            const bool in = g == 0 ? S.contains_infinite : S.contains_finite(g);
            if (in) ++points;
            return;
        }
        for (std::int64_t v = lo[static_cast<std::size_t>(pos)];
             v <= hi[static_cast<std::size_t>(pos)]; ++v) {
            z[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, std::gcd(g, static_cast<std::uint64_t>(v < 0 ? -v : v)));
        }
    };
    if (cells >= 1) rec(rec, 0, 0);

    RegionCount out;
    out.points = points;
    out.mu = static_cast<double>(points) / std::pow(r, k);
    out.expected = gcd_class_set_density(k, S, 1e-12) * region.lebesgue(k);
    return out;
}

struct EvenVisibleDensity {
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
    mpq_class empirical;  // hits / total, exact
    double theoretical = 0.0;  // 2/pi^2
};

// Rank-2 only: fraction of points in the closed L_inf ball of radius r that
// are visible with even L1 norm.
inline EvenVisibleDensity even_visible_density(double r, int k = 2,
                                               std::uint64_t max_points = 1ULL << 34) {
    if (k != 2) throw std::invalid_argument("even-visible density is a rank-2 quantity");
    if (!(r >= 1)) throw std::invalid_argument("radius must be >= 1");
    const std::int64_t R = static_cast<std::int64_t>(std::floor(r));
    const long double box = std::pow(static_cast<long double>(2 * R + 1), 2);
    if (box > static_cast<long double>(max_points))
        throw ResourceError("lattice scan exceeds the configured point budget");

    EvenVisibleDensity out;
    for (std::int64_t x = -R; x <= R; ++x) {
        const std::uint64_t ax = static_cast<std::uint64_t>(x < 0 ? -x : x);
        for (std::int64_t y = -R; y <= R; ++y) {
            const std::uint64_t ay = static_cast<std::uint64_t>(y < 0 ? -y : y);
            ++out.total;
            if (((ax + ay) & 1ULL) == 0 && std::gcd(ax, ay) == 1) ++out.hits;
        }
    }
    out.empirical = mpq_class(static_cast<unsigned long>(out.hits),
                              static_cast<unsigned long>(out.total));
    out.empirical.canonicalize();
    out.theoretical = 2.0 / (std::numbers::pi * std::numbers::pi);
    return out;
}

}  // namespace fgd
