// bit_matrix.hpp — column-packed 0/1 matrix and row-set masks
//
// Bits are stored column-major, 64 rows per word, so the Hamming distance
// between two columns restricted to a row subset is a handful of
// XOR/AND/popcount operations. Row subsets are RowSet masks over the
// original row index space; reordering never copies or mutates bits, it
// only selects rows and columns by their original indices.
#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace oumap {

class RowSet {
public:
    RowSet() = default;
    explicit RowSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

    static RowSet all(std::size_t universe) {
        RowSet s(universe);
        for (std::size_t r = 0; r < universe; ++r) s.insert(r);
        return s;
    }
    static RowSet of(std::size_t universe, std::span<const std::uint32_t> rows) {
        RowSet s(universe);
        for (auto r : rows) s.insert(r);
        return s;
    }

    std::size_t universe() const { return universe_; }
    std::size_t word_count() const { return words_.size(); }
    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

    void insert(std::size_t r) { words_[r >> 6] |= std::uint64_t{1} << (r & 63); }
    void erase(std::size_t r) { words_[r >> 6] &= ~(std::uint64_t{1} << (r & 63)); }
    bool contains(std::size_t r) const { return (words_[r >> 6] >> (r & 63)) & 1U; }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    /// Members in ascending order.
    std::vector<std::uint32_t> indices() const {
        std::vector<std::uint32_t> out;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits != 0) {
                out.push_back(static_cast<std::uint32_t>(w * 64 + std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
        return out;
    }

    /// Keeps only the `n` smallest members.
    RowSet first(std::size_t n) const {
        RowSet out(universe_);
        for (std::size_t w = 0; w < words_.size() && n > 0; ++w) {
            std::uint64_t bits = words_[w];
            while (bits != 0 && n > 0) {
                std::uint64_t low = bits & (~bits + 1);
                out.words_[w] |= low;
                bits ^= low;
                --n;
            }
        }
        return out;
    }

    RowSet& operator-=(const RowSet& other) {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= ~other.words_[w];
        return *this;
    }

    bool operator==(const RowSet&) const = default;

private:
    std::size_t universe_ = 0;
    std::vector<std::uint64_t> words_;
};

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpc_((rows + 63) / 64), bits_(wpc_ * cols, 0) {}

    /// Builds from a row-major list of 0/1 rows (test and fixture convenience).
    static BitMatrix from_rows(const std::vector<std::vector<int>>& rows) {
        const std::size_t m = rows.size();
        const std::size_t n = m == 0 ? 0 : rows.front().size();
        BitMatrix out(m, n);
        for (std::size_t r = 0; r < m; ++r) {
            if (rows[r].size() != n) throw std::invalid_argument("ragged bit rows");
            for (std::size_t c = 0; c < n; ++c) out.set(r, c, rows[r][c] != 0);
        }
        return out;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_column() const { return wpc_; }

    bool get(std::size_t r, std::size_t c) const {
        return (bits_[c * wpc_ + (r >> 6)] >> (r & 63)) & 1U;
    }
    void set(std::size_t r, std::size_t c, bool v) {
        auto& w = bits_[c * wpc_ + (r >> 6)];
        const std::uint64_t bit = std::uint64_t{1} << (r & 63);
        w = v ? (w | bit) : (w & ~bit);
    }

    std::span<const std::uint64_t> column(std::size_t c) const {
        return {bits_.data() + c * wpc_, wpc_};
    }

    std::size_t count_ones() const {
        std::size_t n = 0;
        for (auto w : bits_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    /// Rows of `rows` where columns a and b differ.
    std::size_t distance_on(std::size_t a, std::size_t b, const RowSet& rows) const {
        const auto ca = column(a);
        const auto cb = column(b);
        const auto m = rows.words();
        std::size_t d = 0;
        for (std::size_t w = 0; w < wpc_; ++w) {
            d += static_cast<std::size_t>(std::popcount((ca[w] ^ cb[w]) & m[w]));
        }
        return d;
    }

    /// Rows of `rows` where columns a and b agree.
    RowSet agreement_on(std::size_t a, std::size_t b, const RowSet& rows) const {
        RowSet out(rows_);
        const auto ca = column(a);
        const auto cb = column(b);
        const auto m = rows.words();
        auto o = out.words();
        for (std::size_t w = 0; w < wpc_; ++w) o[w] = ~(ca[w] ^ cb[w]) & m[w];
        return out;
    }

    /// Ones of column c restricted to `rows`.
    std::size_t ones_on(std::size_t c, const RowSet& rows) const {
        const auto cc = column(c);
        const auto m = rows.words();
        std::size_t n = 0;
        for (std::size_t w = 0; w < wpc_; ++w) n += static_cast<std::size_t>(std::popcount(cc[w] & m[w]));
        return n;
    }

    bool operator==(const BitMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t wpc_ = 0;
    std::vector<std::uint64_t> bits_;
};

}  // namespace oumap
