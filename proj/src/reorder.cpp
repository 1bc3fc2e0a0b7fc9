// reorder.cpp — column pairing, similarity row reordering, row compression
#include "oumap/reorder.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace oumap::reorder {

namespace {

std::string format_rows(std::span<const std::uint32_t> rows) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows.size(); ++i) os << (i ? ", " : "") << rows[i];
    os << ']';
    return os.str();
}

std::string format_pairs(std::span<const ColumnPair> pairs) {
    std::ostringstream os;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        os << (i ? " " : "") << '(' << pairs[i].first << ',' << pairs[i].second << ')';
    }
    return os.str();
}

struct Closest {
    std::size_t distance = std::numeric_limits<std::size_t>::max();
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    bool found = false;
};

/// Columns restricted to one row set, packed contiguously for fast scans.
class Projection {
public:
    Projection(const BitMatrix& m, std::span<const std::uint32_t> columns, const RowSet& rows)
        : wpc_(m.words_per_column()), columns_(columns.begin(), columns.end()), words_(columns.size() * wpc_) {
        const auto mask = rows.words();
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const auto col = m.column(columns[i]);
            for (std::size_t w = 0; w < wpc_; ++w) words_[i * wpc_ + w] = col[w] & mask[w];
        }
    }

    bool same(std::size_t i, std::size_t j) const {
        return std::equal(&words_[i * wpc_], &words_[i * wpc_] + wpc_, &words_[j * wpc_]);
    }

    /// Minimum-distance pair; ties keep the lexicographically smallest
    /// (a, b) when `columns` is ascending. `floor` is a known lower bound on
    /// every distance, so the first pair reaching it is the answer.
    Closest closest(std::size_t floor = 0) const {
        switch (wpc_) {
            case 1: return closest_fixed<1>(floor);
            case 2: return closest_fixed<2>(floor);
            default: return closest_fixed<0>(floor);
        }
    }

    /// Every pick that repeated closest() calls would make at distance 0:
    /// bit-identical columns, paired in ascending order within each
    /// pattern, listed by first column.
    std::vector<ColumnPair> identical_pairs() const {
        // Open-addressed table of patterns; each slot remembers one
        // representative column and the column still waiting for a partner.
        constexpr std::uint32_t kEmpty = std::numeric_limits<std::uint32_t>::max();
        struct Slot {
            std::uint32_t rep = kEmpty;
            std::uint32_t pending = kEmpty;
        };
        const std::size_t n = columns_.size();
        std::size_t size = 16;
        while (size < 2 * n) size *= 2;
        std::vector<Slot> table(size);
        std::vector<ColumnPair> pairs;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t h = 0x9E3779B97F4A7C15ULL;
            for (std::size_t w = 0; w < wpc_; ++w) h = (h ^ words_[i * wpc_ + w]) * 0xBF58476D1CE4E5B9ULL;
            std::size_t at = (h ^ (h >> 29)) & (size - 1);
            while (table[at].rep != kEmpty && !same(table[at].rep, i)) at = (at + 1) & (size - 1);
            Slot& slot = table[at];
            if (slot.rep == kEmpty) slot.rep = static_cast<std::uint32_t>(i);
            if (slot.pending == kEmpty) {
                slot.pending = static_cast<std::uint32_t>(i);
            } else {
                pairs.push_back({columns_[slot.pending], columns_[i]});
                slot.pending = kEmpty;
            }
        }
        std::sort(pairs.begin(), pairs.end(), [](const ColumnPair& l, const ColumnPair& r) { return l.first < r.first; });
        return pairs;
    }

private:
    /// `W` words per column, or `wpc_` words when `W` is 0.
    template <std::size_t W>
    Closest closest_fixed(std::size_t floor) const {
        const std::size_t wpc = W == 0 ? wpc_ : W;
        const std::size_t n = columns_.size();
        const std::uint64_t* base = words_.data();
        std::size_t best = std::numeric_limits<std::size_t>::max();
        std::size_t bi = 0;
        std::size_t bj = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const std::uint64_t* x = base + i * wpc;
            const std::uint64_t* y = x + wpc;
            for (std::size_t j = i + 1; j < n; ++j, y += wpc) {
                std::size_t d = 0;
                for (std::size_t w = 0; w < wpc; ++w) d += static_cast<std::size_t>(std::popcount(x[w] ^ y[w]));
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                    if (d <= floor) return {d, columns_[i], columns_[j], true};
                }
            }
        }
        if (n < 2) return {};
        return {best, columns_[bi], columns_[bj], true};
    }

    std::size_t wpc_;
    std::vector<std::uint32_t> columns_;
    std::vector<std::uint64_t> words_;
};

/// Minimum-sHD pair among `columns` (ascending) on `rows`; ties keep the
/// lexicographically smallest (a, b).
Closest closest_pair(const BitMatrix& m, std::span<const std::uint32_t> columns, const RowSet& rows) {
    if (columns.size() < 2) return {};
    return Projection(m, columns, rows).closest();
}

struct Scored {
    std::uint32_t d;
    std::uint32_t i;
    std::uint32_t j;
};

/// Every pair of `cols` (ascending) with its sHD on `rows`, ordered by
/// (sHD, i, j).
std::vector<Scored> scored_pairs(const BitMatrix& m, std::span<const std::uint32_t> cols, const RowSet& rows) {
    const std::size_t n = cols.size();
    if (n < 2) return {};
    std::vector<Scored> lex;
    lex.reserve(n * (n - 1) / 2);
    std::vector<std::size_t> count(rows.count() + 2, 0);
    for (std::size_t x = 0; x + 1 < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
            const auto d = static_cast<std::uint32_t>(m.distance_on(cols[x], cols[y], rows));
            lex.push_back({d, cols[x], cols[y]});
            ++count[d + 1];
        }
    }
    // Stable counting sort keeps the (i, j) order inside each distance.
    for (std::size_t v = 1; v < count.size(); ++v) count[v] += count[v - 1];
    std::vector<Scored> out(lex.size());
    for (const auto& s : lex) out[count[s.d]++] = s;
    return out;
}

ColumnPairDict match_pairs(const BitMatrix& m, std::span<const std::uint32_t> cols, std::span<const Scored> scored,
                           const RowSet& rows) {
    ColumnPairDict dict;
    std::vector<bool> used(m.cols(), false);
    std::size_t remaining = cols.size();
    for (const auto& s : scored) {
        if (remaining < 2) break;
        if (used[s.i] || used[s.j]) continue;
        used[s.i] = used[s.j] = true;
        remaining -= 2;
        PairEntry e;
        e.columns = {s.i, s.j};
        e.rows = m.agreement_on(s.i, s.j, rows);
        e.numrows = e.rows.count();
        dict.entries.push_back(std::move(e));
    }
    for (auto c : cols) {
        if (!used[c]) dict.unpaired = c;
    }
    return dict;
}

struct Candidate {
    std::vector<ColumnPair> pairs;
    RowSet rows;
};

}  // namespace

std::size_t shd(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("sHD needs equal-length columns");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += static_cast<std::size_t>((a[i] ^ b[i]) & 1U);
    return d;
}

ColumnPairDict column_pair(const BitMatrix& m, std::span<const std::uint32_t> columns, const RowSet& rows) {
    ColumnPairDict dict;
    std::vector<std::uint32_t> cols(columns.begin(), columns.end());
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    if (cols.size() < 2) {
        if (cols.size() == 1) dict.unpaired = cols.front();
        return dict;
    }

    // Repeatedly taking the global minimum among unpaired columns is the
    // same as walking the pairs in (sHD, i, j) order and skipping used ones.
    return match_pairs(m, cols, scored_pairs(m, cols, rows), rows);
}

std::size_t ReorderResult::stored_columns() const {
    std::size_t n = 0;
    for (const auto& b : bands) n += b.stored_columns();
    return n;
}

RowBand finalize_band(const BitMatrix& m, std::vector<std::uint32_t> rows, std::span<const ColumnPair> seed_pairs,
                      std::size_t ou_height, bool complete_pairs) {
    RowBand band;
    band.padding = rows.size() < ou_height ? ou_height - rows.size() : 0;
    const RowSet mask = RowSet::of(m.rows(), rows);
    band.rows = std::move(rows);

    std::vector<bool> taken(m.cols(), false);
    for (const auto& p : seed_pairs) {
        taken[p.first] = taken[p.second] = true;
        if (m.ones_on(p.first, mask) == 0) {
            band.zero_columns.push_back(p.first);
            band.zero_columns.push_back(p.second);
        } else {
            band.pairs.push_back(p);
            ++band.searched_pairs;
        }
    }

    // Group the rest by their bit pattern on the band rows.
    std::map<std::vector<std::uint64_t>, std::vector<std::uint32_t>> by_pattern;
    for (std::uint32_t c = 0; c < m.cols(); ++c) {
        if (taken[c]) continue;
        if (m.ones_on(c, mask) == 0) {
            band.zero_columns.push_back(c);
            continue;
        }
        if (!complete_pairs) {
            band.uniques.push_back(c);
            continue;
        }
        const auto col = m.column(c);
        std::vector<std::uint64_t> key(col.size());
        for (std::size_t w = 0; w < col.size(); ++w) key[w] = col[w] & mask.words()[w];
        by_pattern[std::move(key)].push_back(c);
    }
    std::vector<ColumnPair> extra;
    for (auto& [pattern, cols] : by_pattern) {
        for (std::size_t i = 0; i + 1 < cols.size(); i += 2) extra.push_back({cols[i], cols[i + 1]});
        if (cols.size() % 2 == 1) band.uniques.push_back(cols.back());
    }
    std::sort(extra.begin(), extra.end(), [](const ColumnPair& l, const ColumnPair& r) { return l.first < r.first; });
    band.pairs.insert(band.pairs.end(), extra.begin(), extra.end());
    std::sort(band.uniques.begin(), band.uniques.end());
    std::sort(band.zero_columns.begin(), band.zero_columns.end());
    return band;
}

ReorderResult reorder_similarity(const BitMatrix& m, std::size_t h, std::size_t w, const ReorderOptions& options) {
    if (h == 0) throw std::invalid_argument("OU height must be >= 1");
    if (w == 0) throw std::invalid_argument("OU width must be >= 1");
    ReorderResult result;
    if (m.rows() == 0) return result;

    auto log = [&](const std::string& line) {
        if (options.trace) result.trace.push_back(line);
    };

    std::vector<std::uint32_t> all_columns(m.cols());
    std::iota(all_columns.begin(), all_columns.end(), 0U);
    RowSet remaining = RowSet::all(m.rows());
    std::size_t iteration = 0;

    while (remaining.count() >= h) {
        ++iteration;
        // Every column is eligible again: each band covers different rows.
        const std::size_t remaining_rows = remaining.count();
        const ColumnPairDict dict = match_pairs(m, all_columns, scored_pairs(m, all_columns, remaining), remaining);
        if (options.trace) {
            std::ostringstream os;
            os << "OU " << iteration << " Step 1: " << remaining_rows << " rows, pairs by sHD:";
            for (const auto& e : dict.entries) {
                os << " (" << e.columns.first << ',' << e.columns.second << "):" << e.numrows;
            }
            log(os.str());
        }

        std::optional<Candidate> best;
        for (const auto& seed : dict.entries) {
            if (seed.numrows < h) continue;
            Candidate cand;
            cand.pairs.push_back(seed.columns);
            cand.rows = seed.rows;
            std::vector<bool> used(m.cols(), false);
            used[seed.columns.first] = used[seed.columns.second] = true;
            std::size_t numrows = seed.numrows;
            std::ostringstream chain;
            if (options.trace) chain << "OU " << iteration << " Step 2: seed (" << seed.columns.first << ',' << seed.columns.second
                  << ") numrows=" << numrows;
            while (numrows >= h) {
                std::vector<std::uint32_t> free_cols;
                for (auto c : all_columns) {
                    if (!used[c]) free_cols.push_back(c);
                }
                // Zero-distance picks leave the rows unchanged, so a whole run
                // of them is resolved at once.
                if (options.stepwise_chain) {
                    const Closest next = closest_pair(m, free_cols, cand.rows);
                    if (!next.found || numrows - std::min(numrows, next.distance) < h) {
                        cand.rows = cand.rows.first(h);
                        break;
                    }
                    numrows -= next.distance;
                    cand.rows = m.agreement_on(next.a, next.b, cand.rows);
                    used[next.a] = used[next.b] = true;
                    cand.pairs.push_back({next.a, next.b});
                    if (options.trace) chain << " -> (" << next.a << ',' << next.b << ") numrows=" << numrows;
                    continue;
                }
                const Projection proj(m, free_cols, cand.rows);
                const auto identical = proj.identical_pairs();
                if (!identical.empty()) {
                    for (const auto& p : identical) {
                        used[p.first] = used[p.second] = true;
                        cand.pairs.push_back(p);
                        if (options.trace) chain << " -> (" << p.first << ',' << p.second << ") numrows=" << numrows;
                    }
                    continue;
                }
                // No identical pair is left, so a distance of 1 cannot be beaten.
                const Closest next = proj.closest(1);
                if (!next.found || numrows - std::min(numrows, next.distance) < h) {
                    cand.rows = cand.rows.first(h);
                    break;
                }
                numrows -= next.distance;
                cand.rows = m.agreement_on(next.a, next.b, cand.rows);
                used[next.a] = used[next.b] = true;
                cand.pairs.push_back({next.a, next.b});
                if (options.trace) chain << " -> (" << next.a << ',' << next.b << ") numrows=" << numrows;
            }
            if (options.trace) log(chain.str() + " | " + std::to_string(cand.pairs.size()) + " pairs");
            if (!best || cand.pairs.size() > best->pairs.size()) best = std::move(cand);
        }

        std::vector<std::uint32_t> rows;
        std::vector<ColumnPair> pairs;
        if (best) {
            rows = best->rows.indices();
            pairs = std::move(best->pairs);
        } else {
            // No pair agrees on h rows: take the next h rows as they are.
            rows = remaining.first(h).indices();
            log("OU " + std::to_string(iteration) + " Step 2: no seed reaches h rows, taking rows in order");
        }
        RowBand band = finalize_band(m, rows, pairs, h, options.complete_pairs);
        if (options.trace) {
            log("OU " + std::to_string(iteration) + " Step 3: rows " + format_rows(band.rows) + " pairs " +
                format_pairs(band.pairs) + " uniques " + std::to_string(band.uniques.size()) + " zero " +
                std::to_string(band.zero_columns.size()));
        }
        remaining -= RowSet::of(m.rows(), band.rows);
        result.bands.push_back(std::move(band));
    }

    if (remaining.count() > 0) {
        result.leftover_rows = remaining.indices();
        RowBand band = finalize_band(m, result.leftover_rows, {}, h, options.complete_pairs);
        log("Leftover: rows " + format_rows(band.rows) + " padded by " + std::to_string(band.padding) + " pairs " +
            format_pairs(band.pairs));
        result.bands.push_back(std::move(band));
    }
    return result;
}

ReorderResult naive_bands(const BitMatrix& m, std::size_t h) {
    if (h == 0) throw std::invalid_argument("OU height must be >= 1");
    ReorderResult result;
    for (std::size_t start = 0; start < m.rows(); start += h) {
        std::vector<std::uint32_t> rows;
        for (std::size_t r = start; r < std::min(m.rows(), start + h); ++r) rows.push_back(static_cast<std::uint32_t>(r));
        if (rows.size() < h) result.leftover_rows = rows;
        result.bands.push_back(finalize_band(m, std::move(rows), {}, h, false));
    }
    return result;
}

std::vector<std::uint32_t> nonzero_rows(const BitMatrix& m, std::span<const std::uint32_t> rows,
                                        std::span<const ColumnPair> pairs, std::span<const std::uint32_t> uniques) {
    std::vector<std::uint32_t> out;
    for (auto r : rows) {
        bool any = false;
        for (const auto& p : pairs) any = any || m.get(r, p.first);
        for (auto c : uniques) any = any || m.get(r, c);
        if (any) out.push_back(r);
    }
    return out;
}

std::size_t CompressedPlane::active_rows() const {
    std::size_t n = 0;
    for (const auto& ou : ous) n += ou.active_rows.size();
    return n;
}

CompressedPlane compress_rows(const BitMatrix& m, const ReorderResult& bands, std::size_t h, std::size_t w,
                              const CompressOptions& options) {
    if (h == 0 || w == 0) throw std::invalid_argument("OU dimensions must be positive");
    CompressedPlane plane;
    for (std::size_t b = 0; b < bands.bands.size(); ++b) {
        const RowBand& band = bands.bands[b];
        const RowSet mask = RowSet::of(m.rows(), band.rows);

        // Pairs stay frozen in front; only unique columns move.
        std::vector<std::uint32_t> movable = band.uniques;
        if (options.reorder_columns) {
            auto pattern_less = [&](std::uint32_t x, std::uint32_t y) {
                const auto cx = m.column(x);
                const auto cy = m.column(y);
                for (std::size_t i = 0; i < cx.size(); ++i) {
                    const auto a = cx[i] & mask.words()[i];
                    const auto c = cy[i] & mask.words()[i];
                    if (a != c) return a < c;
                }
                return x < y;
            };
            std::vector<std::size_t> ones(m.cols(), 0);
            for (auto c : movable) ones[c] = m.ones_on(c, mask);
            std::sort(movable.begin(), movable.end(), [&](std::uint32_t x, std::uint32_t y) {
                if (ones[x] != ones[y]) return ones[x] < ones[y];
                return pattern_less(x, y);
            });
        }

        const std::size_t total = band.pairs.size() + movable.size();
        for (std::size_t start = 0; start < total; start += w) {
            OUAssignment ou;
            ou.ou_id = static_cast<std::uint32_t>(plane.ous.size());
            ou.band = static_cast<std::uint32_t>(b);
            ou.rows = band.rows;
            ou.padding = band.padding;
            for (std::size_t j = start; j < std::min(total, start + w); ++j) {
                if (j < band.pairs.size()) {
                    ou.pairs.push_back(band.pairs[j]);
                } else {
                    ou.uniques.push_back(movable[j - band.pairs.size()]);
                }
            }
            std::sort(ou.pairs.begin(), ou.pairs.end(),
                      [](const ColumnPair& l, const ColumnPair& r) { return l.first < r.first; });
            std::sort(ou.uniques.begin(), ou.uniques.end());
            ou.active_rows = nonzero_rows(m, ou.rows, ou.pairs, ou.uniques);
            plane.rows_removed += ou.rows.size() - ou.active_rows.size();
            plane.ous.push_back(std::move(ou));
        }
    }
    return plane;
}

}  // namespace oumap::reorder
