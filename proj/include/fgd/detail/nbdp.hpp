// Level-synchronous dynamic program over the abelianization lattice for
// non-backtracking words.  State: (exponent vector z, last letter x) with
//   N_n(z, x) = sum_{y != x^{-1}} N_{n-1}(z - e(x), y)
//             = M_{n-1}(z - e(x)) - N_{n-1}(z - e(x), x^{-1}),
// where M is the marginal over last letters.  Only the frontier (two
// levels) is held; callers harvest whatever they need per level.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "fgd/detail/parallel.hpp"
#include "fgd/words.hpp"

namespace fgd::detail {

class NbWalkDp {
public:
    NbWalkDp(int k, int n_max) : k_(k), n_max_(n_max), side_(2 * n_max + 1) {
        check_rank(k);
        if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
        strides_.assign(static_cast<std::size_t>(k), 1);
        for (int i = k - 2; i >= 0; --i)
            strides_[static_cast<std::size_t>(i)] =
                strides_[static_cast<std::size_t>(i + 1)] * side_;
        cells_ = strides_[0] * side_;
        const int L = 2 * k;
        layers_.assign(static_cast<std::size_t>(L), {});
        layers_next_.assign(static_cast<std::size_t>(L), {});
        for (int x = 0; x < L; ++x) {
            layers_[static_cast<std::size_t>(x)].resize(static_cast<std::size_t>(cells_));
            layers_next_[static_cast<std::size_t>(x)].resize(static_cast<std::size_t>(cells_));
        }
        marg_.resize(static_cast<std::size_t>(cells_));
        marg_next_.resize(static_cast<std::size_t>(cells_));
        marg_[static_cast<std::size_t>(origin_cell())] = 1;  // the empty word
    }

    // Rough footprint of the frontier buffers, for budget checks before
    // construction.  avg_limb_bytes should account for the value sizes at
    // the deepest level.
    static std::uint64_t estimate_bytes(int k, int n_max, double avg_limb_bytes) {
        const long double cells = std::pow(static_cast<long double>(2 * n_max + 1), k);
        const long double arrays = 4.0L * k + 2.0L;
        return static_cast<std::uint64_t>(cells * arrays *
                                          (sizeof(mpz_class) + avg_limb_bytes));
    }

    int rank() const { return k_; }
    int level() const { return level_; }

    // Restart from a single length-1 word (used for first-letter-fixed
    // counts, e.g. cyclically reduced cores).
    void restrict_to_first_letter(Letter l) {
        if (level_ != 0) throw std::logic_error("restrict before advancing");
        marg_[static_cast<std::size_t>(origin_cell())] = 0;
        const int x = letter_index(k_, l);
        std::int64_t c = origin_cell() + step_offset(x);
        layers_[static_cast<std::size_t>(x)][static_cast<std::size_t>(c)] = 1;
        marg_[static_cast<std::size_t>(c)] = 1;
        level_ = 1;
    }

    void advance(int threads = 0) {
        if (level_ >= n_max_) throw std::logic_error("advance past n_max");
        const int L = level_ + 1;
        const int nl = 2 * k_;

        run_tasks(nl, threads, [&](int x) {
            auto& next = layers_next_[static_cast<std::size_t>(x)];
            const auto& inv = layers_[static_cast<std::size_t>(inverse_index(k_, x))];
            const std::int64_t off = step_offset(x);
            const int coord = letter_at(k_, x).generator() - 1;
            const int delta = letter_at(k_, x).sign();
            iterate(L, -L, L + 1, [&](std::span<const std::int64_t> z, std::int64_t cell,
                                      std::int64_t l1) {
                const std::int64_t zc = z[static_cast<std::size_t>(coord)];
                const std::int64_t src_l1 = l1 - std::abs(zc) + std::abs(zc - delta);
                auto& dst = next[static_cast<std::size_t>(cell)];
                if (src_l1 <= level_) {
                    const std::size_t sc = static_cast<std::size_t>(cell - off);
                    mpz_sub(dst.get_mpz_t(), marg_[sc].get_mpz_t(), inv[sc].get_mpz_t());
                } else {
                    dst = 0;
                }
            });
        });

        // marginal of the new level, sliced over the leading coordinate
        parallel_chunks(2 * L + 1, threads, [&](int, int b, int e) {
            iterate(L, b - L, e - L, [&](std::span<const std::int64_t>, std::int64_t cell,
                                         std::int64_t) {
                auto& m = marg_next_[static_cast<std::size_t>(cell)];
                m = layers_next_[0][static_cast<std::size_t>(cell)];
                for (int x = 1; x < nl; ++x)
                    mpz_add(m.get_mpz_t(), m.get_mpz_t(),
                            layers_next_[static_cast<std::size_t>(x)][static_cast<std::size_t>(cell)]
                                .get_mpz_t());
            });
        });

        layers_.swap(layers_next_);
        marg_.swap(marg_next_);
        level_ = L;
    }

    // Visit the parity diamond of the current level: fn(z, box_cell, l1).
    template <typename Fn>
    void for_each_current(Fn&& fn) const {
        iterate(level_, -level_, level_ + 1, fn);
    }

    const mpz_class& marginal_at_cell(std::int64_t cell) const {
        return marg_[static_cast<std::size_t>(cell)];
    }
    const mpz_class& layer_at_cell(int letter_idx, std::int64_t cell) const {
        return layers_[static_cast<std::size_t>(letter_idx)][static_cast<std::size_t>(cell)];
    }

private:
    std::int64_t origin_cell() const {
        std::int64_t c = 0;
        for (int i = 0; i < k_; ++i) c += n_max_ * strides_[static_cast<std::size_t>(i)];
        return c;
    }
    std::int64_t step_offset(int letter_idx) const {
        const Letter l = letter_at(k_, letter_idx);
        return l.sign() * strides_[static_cast<std::size_t>(l.generator() - 1)];
    }

    // Iterate lattice points with ||z||_1 <= L, ||z||_1 == L (mod 2),
    // restricted to z[0] in [z0_begin, z0_end).  fn(z, box_cell, ||z||_1).
    template <typename Fn>
    void iterate(int L, std::int64_t z0_begin, std::int64_t z0_end, Fn&& fn) const {
        std::vector<std::int64_t> z(static_cast<std::size_t>(k_));
        const std::int64_t lo = std::max<std::int64_t>(z0_begin, -L);
        const std::int64_t hi = std::min<std::int64_t>(z0_end, L + 1);
        for (std::int64_t v = lo; v < hi; ++v) {
            z[0] = v;
            const std::int64_t base = (v + n_max_) * strides_[0];
            recurse(z, 1, L - std::abs(v), base, std::abs(v), fn);
        }
    }

    template <typename Fn>
    void recurse(std::vector<std::int64_t>& z, int pos, std::int64_t budget, std::int64_t base,
                 std::int64_t used, Fn&& fn) const {
        if (pos + 1 == k_) {
            // last coordinate runs over -budget..budget in steps of two
            std::int64_t cell = base + (-budget + n_max_);
            for (std::int64_t v = -budget; v <= budget; v += 2, cell += 2) {
                z[static_cast<std::size_t>(pos)] = v;
                fn(std::span<const std::int64_t>(z), cell, used + std::abs(v));
            }
            return;
        }
        for (std::int64_t v = -budget; v <= budget; ++v) {
            z[static_cast<std::size_t>(pos)] = v;
            recurse(z, pos + 1, budget - std::abs(v),
                    base + (v + n_max_) * strides_[static_cast<std::size_t>(pos)],
                    used + std::abs(v), fn);
        }
    }

    int k_, n_max_;
    std::int64_t side_, cells_;
    std::vector<std::int64_t> strides_;
    std::vector<std::vector<mpz_class>> layers_, layers_next_;
    std::vector<mpz_class> marg_, marg_next_;
    int level_ = 0;
};

}  // namespace fgd::detail
