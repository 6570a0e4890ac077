// Free group arithmetic over a fixed basis a_1..a_k: freely reduced words,
// concatenation, cyclic reduction, primitive roots, abelianization, and
// exact sphere/ball cardinalities.  The sphere enumerator doubles as the
// brute-force oracle for everything built on top of it.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace fgd {

// One generator or its inverse, packed as a signed index:
// +g is a_g, -g is a_g^{-1}, g in [1, rank].
struct Letter {
    std::int8_t code = 0;

    constexpr Letter inverse() const { return Letter{static_cast<std::int8_t>(-code)}; }
    constexpr int generator() const { return code < 0 ? -code : code; }
    constexpr int sign() const { return code < 0 ? -1 : 1; }
    constexpr bool operator==(const Letter&) const = default;
};

constexpr Letter make_letter(int generator, int sign) {
    return Letter{static_cast<std::int8_t>(sign < 0 ? -generator : generator)};
}

namespace detail {

// Letters indexed 0..2k-1: first the k generators, then their inverses.
constexpr Letter letter_at(int k, int idx) {
    return idx < k ? Letter{static_cast<std::int8_t>(idx + 1)}
                   : Letter{static_cast<std::int8_t>(-(idx - k + 1))};
}
constexpr int letter_index(int k, Letter l) {
    return l.code > 0 ? l.code - 1 : k + (-l.code - 1);
}
constexpr int inverse_index(int k, int idx) { return idx < k ? idx + k : idx - k; }

inline void check_rank(int k) {
    if (k < 2 || k > 120) throw std::invalid_argument("rank must be in [2, 120]");
}

}  // namespace detail

// Exponent vector in Z^k, the abelianization image of a word.
struct ExponentVector {
    std::vector<std::int64_t> coords;

    std::int64_t l1() const {
        std::int64_t s = 0;
        for (auto c : coords) s += c < 0 ? -c : c;
        return s;
    }
    std::int64_t squared_l2() const {
        std::int64_t s = 0;
        for (auto c : coords) s += c * c;
        return s;
    }
    bool is_zero() const {
        return std::all_of(coords.begin(), coords.end(), [](auto c) { return c == 0; });
    }
    bool operator==(const ExponentVector&) const = default;
};

struct CyclicDecomposition;
struct RootPower;

// A freely reduced word.  Construction always reduces, so the no-adjacent-
// cancellation invariant holds for every live instance.
class Word {
public:
    explicit Word(int rank) : rank_(rank) { detail::check_rank(rank); }

    static Word reduced(int rank, std::span<const Letter> letters) {
        Word w(rank);
        w.letters_.reserve(letters.size());
        for (Letter l : letters) w.push_reduce(l);
        return w;
    }

    // Trusted fast path: `letters` must already be freely reduced.
    static Word from_reduced(int rank, std::vector<Letter> letters) {
        Word w(rank);
        w.letters_ = std::move(letters);
        return w;
    }

    // "abA" is a * b * a^{-1}: lowercase = generator, uppercase = inverse.
    static Word parse(int rank, std::string_view text) {
        detail::check_rank(rank);
        if (rank > 26) throw std::invalid_argument("textual words need rank <= 26");
        Word w(rank);
        for (char ch : text) {
            if (ch == ' ' || ch == '\t') continue;
            int gen, sign;
            if (ch >= 'a' && ch <= 'z') gen = ch - 'a' + 1, sign = 1;
            else if (ch >= 'A' && ch <= 'Z') gen = ch - 'A' + 1, sign = -1;
            else throw std::invalid_argument(std::string("bad letter: ") + ch);
            if (gen > rank) throw std::invalid_argument(std::string("letter outside basis: ") + ch);
            w.push_reduce(make_letter(gen, sign));
        }
        return w;
    }

    int rank() const { return rank_; }
    std::size_t length() const { return letters_.size(); }
    bool is_identity() const { return letters_.empty(); }
    std::span<const Letter> letters() const { return letters_; }

    bool operator==(const Word& o) const { return rank_ == o.rank_ && letters_ == o.letters_; }

    Word operator*(const Word& o) const {
        Word w(*this);
        for (Letter l : o.letters_) w.push_reduce(l);
        return w;
    }

    Word inverse() const {
        Word w(rank_);
        w.letters_.reserve(letters_.size());
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
            w.letters_.push_back(it->inverse());
        return w;
    }

    Word pow(int m) const {
        if (m < 0) throw std::invalid_argument("pow wants m >= 0");
        Word w(rank_);
        for (int i = 0; i < m; ++i) w = w * *this;
        return w;
    }

    Word conjugated_by(const Word& g) const { return g * *this * g.inverse(); }

    CyclicDecomposition cyclic_reduce() const;
    RootPower primitive_root() const;

    std::string str() const {
        if (rank_ > 26) return "<rank>26 word>";
        std::string s;
        s.reserve(letters_.size());
        for (Letter l : letters_)
            s.push_back(static_cast<char>((l.code > 0 ? 'a' : 'A') + l.generator() - 1));
        return s.empty() ? std::string("1") : s;
    }

private:
    void push_reduce(Letter l) {
        if (l.generator() < 1 || l.generator() > rank_)
            throw std::invalid_argument("letter outside basis");
        if (!letters_.empty() && letters_.back() == l.inverse()) letters_.pop_back();
        else letters_.push_back(l);
    }

    int rank_;
    std::vector<Letter> letters_;
};

struct CyclicDecomposition {
    Word conjugator;  // shortest g with word == g * core * g^{-1}
    Word core;        // cyclically reduced
};

struct RootPower {
    Word root;
    int exponent;  // maximal: word == root^exponent, root not a proper power
};

inline CyclicDecomposition Word::cyclic_reduce() const {
    std::size_t i = 0, j = letters_.size();
    while (j - i >= 2 && letters_[i] == letters_[j - 1].inverse()) ++i, --j;
    CyclicDecomposition d{Word(rank_), Word(rank_)};
    d.conjugator.letters_.assign(letters_.begin(), letters_.begin() + i);
    d.core.letters_.assign(letters_.begin() + i, letters_.begin() + j);
    return d;
}

// Smallest period of the cyclically reduced core over divisors of its
// length; roots in free groups are unique, so the first period found
// gives the maximal exponent.
inline RootPower Word::primitive_root() const {
    if (is_identity()) throw std::invalid_argument("identity word has no primitive root");
    auto dec = cyclic_reduce();
    const auto& c = dec.core.letters_;
    const std::size_t len = c.size();
    for (std::size_t d = 1; d <= len / 2; ++d) {
        if (len % d != 0) continue;
        bool periodic = true;
        for (std::size_t i = d; i < len && periodic; ++i) periodic = (c[i] == c[i - d]);
        if (periodic) {
            // g * c0 * g^{-1} is reduced as written because c0 shares its
            // first and last letters with the core.
            Word root(rank_);
            root.letters_ = dec.conjugator.letters_;
            root.letters_.insert(root.letters_.end(), c.begin(), c.begin() + d);
            for (auto it = dec.conjugator.letters_.rbegin(); it != dec.conjugator.letters_.rend();
                 ++it)
            root.letters_.push_back(it->inverse());
            return {std::move(root), static_cast<int>(len / d)};
        }
    }
    return {*this, 1};
}

inline ExponentVector abelianize(const Word& w) {
    ExponentVector z;
    z.coords.assign(static_cast<std::size_t>(w.rank()), 0);
    for (Letter l : w.letters()) z.coords[static_cast<std::size_t>(l.generator() - 1)] += l.sign();
    return z;
}

// #\{reduced words of length n\} = 2k(2k-1)^{n-1} for n >= 1, 1 for n = 0.
inline mpz_class sphere_size(int k, int n) {
    detail::check_rank(k);
    if (n < 0) throw std::invalid_argument("negative radius");
    if (n == 0) return 1;
    mpz_class s;
    mpz_ui_pow_ui(s.get_mpz_t(), static_cast<unsigned long>(2 * k - 1),
                  static_cast<unsigned long>(n - 1));
    return s * (2 * k);
}

inline mpz_class ball_size(int k, int n) {
    mpz_class b = 0;
    for (int m = 0; m <= n; ++m) b += sphere_size(k, m);
    return b;
}

// Depth-first non-backtracking extension; every freely reduced word of
// length exactly n is produced once.  fn receives a span valid only for
// the duration of the call.
template <typename Fn>
void enumerate_sphere(int k, int n, Fn&& fn) {
    detail::check_rank(k);
    if (n < 0) throw std::invalid_argument("negative radius");
    std::vector<Letter> buf(static_cast<std::size_t>(n));
    if (n == 0) {
        fn(std::span<const Letter>{});
        return;
    }
    auto rec = [&](auto&& self, int pos) -> void {
        const Letter banned = pos > 0 ? buf[static_cast<std::size_t>(pos - 1)].inverse() : Letter{0};
        for (int idx = 0; idx < 2 * k; ++idx) {
            Letter l = detail::letter_at(k, idx);
            if (pos > 0 && l == banned) continue;
            buf[static_cast<std::size_t>(pos)] = l;
            if (pos + 1 == n) fn(std::span<const Letter>(buf));
            else self(self, pos + 1);
        }
    };
    rec(rec, 0);
}

inline std::vector<Word> sphere_words(int k, int n) {
    std::vector<Word> out;
    enumerate_sphere(k, n, [&](std::span<const Letter> ls) {
        out.push_back(Word::from_reduced(k, std::vector<Letter>(ls.begin(), ls.end())));
    });
    return out;
}

class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fgd
