// Flat indexing of the parity diamond
//   { z in Z^k : ||z||_1 <= n and ||z||_1 == n (mod 2) },
// which is exactly the support of the level-n counts of the walk.
#pragma once

#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <vector>

namespace fgd::detail {

class ParityDiamond {
public:
    ParityDiamond(int rank, int radius) : rank_(rank), radius_(radius) {
        if (rank < 1 || radius < 0) throw std::invalid_argument("bad diamond shape");
        // counts_[j][m]: points of the j-dimensional parity diamond of radius m
        counts_.assign(static_cast<std::size_t>(rank + 1), {});
        auto& c1 = counts_[1];
        c1.resize(static_cast<std::size_t>(radius + 1));
        for (int m = 0; m <= radius; ++m) c1[static_cast<std::size_t>(m)] = static_cast<std::size_t>(m + 1);
        prefix_.assign(static_cast<std::size_t>(rank + 1), {});
        for (int j = 2; j <= rank; ++j) {
            auto& pj = prefix_[static_cast<std::size_t>(j)];
            pj.assign(static_cast<std::size_t>(radius + 1) * stride(), 0);
            auto& cj = counts_[static_cast<std::size_t>(j)];
            cj.resize(static_cast<std::size_t>(radius + 1));
            const auto& cprev = counts_[static_cast<std::size_t>(j - 1)];
            for (int b = 0; b <= radius; ++b) {
                std::size_t acc = 0;
                for (int u = -b; u <= b; ++u) {
                    acc += cprev[static_cast<std::size_t>(b - std::abs(u))];
                    pj[cell(b, u)] = acc;
                }
                cj[static_cast<std::size_t>(b)] = acc;
            }
        }
    }

    int rank() const { return rank_; }
    int radius() const { return radius_; }
    std::size_t size() const { return counts_[static_cast<std::size_t>(rank_)][static_cast<std::size_t>(radius_)]; }

    bool contains(std::span<const std::int64_t> z) const {
        std::int64_t l1 = 0;
        for (auto v : z) l1 += v < 0 ? -v : v;
        return l1 <= radius_ && ((l1 ^ radius_) & 1) == 0;
    }

    // Valid only when contains(z); coordinates ordered lexicographically.
    std::size_t index(std::span<const std::int64_t> z) const {
        std::size_t idx = 0;
        int b = radius_;
        for (int i = 0; i + 1 < rank_; ++i) {
            const int j = rank_ - i;
            const auto u = z[static_cast<std::size_t>(i)];
            if (u > -b) idx += prefix_[static_cast<std::size_t>(j)][cell(b, static_cast<int>(u) - 1)];
            b -= static_cast<int>(u < 0 ? -u : u);
        }
        idx += static_cast<std::size_t>((z[static_cast<std::size_t>(rank_ - 1)] + b) / 2);
        return idx;
    }

    // Visit every point in index order; fn(coords, flat_index).
    template <typename Fn>
    void for_each(Fn&& fn) const {
        std::vector<std::int64_t> z(static_cast<std::size_t>(rank_));
        std::size_t idx = 0;
        visit(z, 0, radius_, idx, fn);
    }

private:
    std::size_t stride() const { return static_cast<std::size_t>(2 * radius_ + 1); }
    std::size_t cell(int b, int u) const {
        return static_cast<std::size_t>(b) * stride() + static_cast<std::size_t>(u + radius_);
    }

    template <typename Fn>
    void visit(std::vector<std::int64_t>& z, int pos, int budget, std::size_t& idx, Fn&& fn) const {
        if (pos + 1 == rank_) {
            for (std::int64_t v = -budget; v <= budget; v += 2) {
                z[static_cast<std::size_t>(pos)] = v;
                fn(std::span<const std::int64_t>(z), idx++);
            }
            return;
        }
        for (std::int64_t v = -budget; v <= budget; ++v) {
            z[static_cast<std::size_t>(pos)] = v;
            visit(z, pos + 1, budget - static_cast<int>(v < 0 ? -v : v), idx, fn);
        }
    }

    int rank_, radius_;
    std::vector<std::vector<std::size_t>> counts_;
    std::vector<std::vector<std::size_t>> prefix_;
};

}  // namespace fgd::detail
