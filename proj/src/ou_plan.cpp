// ou_plan.cpp — slot placement, crossbar images and output index streams
#include "oumap/ou_plan.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace oumap::plan {

namespace {

std::uint8_t checked_delta(std::int64_t d) {
    if (d < 0 || d > 255) throw CapacityError("output index delta does not fit in 8 bits");
    return static_cast<std::uint8_t>(d);
}

bool weight_bit(const Int8Matrix& w, std::size_t r, std::size_t c, int plane) {
    return (static_cast<std::uint8_t>(w(r, c)) >> plane) & 1U;
}

/// Calls emit(row, col) for every output cell that a set image bit drives.
template <typename Emit>
void for_each_driven_cell(const Geometry& g, const TileRect& rect, const PlaneProgram& plane, Emit emit) {
    for (const auto& placed : plane.ous) {
        const auto& ou = placed.ou;
        for (std::size_t k = 0; k < ou.active_rows.size(); ++k) {
            const std::size_t xr = placed.slot_row * g.ou_rows + k;
            for (std::size_t j = 0; j < ou.physical_columns(); ++j) {
                const std::size_t xc = placed.slot_col * g.ou_cols + j;
                if (!plane.image.get(xr, xc)) continue;
                const std::size_t r = rect.row_offset + ou.active_rows[k];
                if (j < ou.pairs.size()) {
                    emit(r, rect.col_offset + ou.pairs[j].first);
                    emit(r, rect.col_offset + ou.pairs[j].second);
                } else {
                    emit(r, rect.col_offset + ou.uniques[j - ou.pairs.size()]);
                }
            }
        }
    }
}

std::string where(std::size_t tile, int plane) {
    return "tile " + std::to_string(tile) + " plane " + std::to_string(plane);
}

}  // namespace

OutputIndexStream encode_output_indices(const reorder::OUAssignment& ou) {
    auto pairs = ou.pairs;
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    auto uniques = ou.uniques;
    std::sort(uniques.begin(), uniques.end());

    OutputIndexStream s;
    s.pair_count = static_cast<std::uint32_t>(pairs.size());
    s.deltas.reserve(ou.index_count());
    std::int64_t prev = 0;
    for (const auto& p : pairs) {
        if (p.second <= p.first) throw std::invalid_argument("pair columns must be ascending");
        s.deltas.push_back(checked_delta(static_cast<std::int64_t>(p.first) - prev));
        s.deltas.push_back(checked_delta(static_cast<std::int64_t>(p.second) - p.first));
        prev = p.first;
    }
    prev = 0;
    for (auto u : uniques) {
        s.deltas.push_back(checked_delta(static_cast<std::int64_t>(u) - prev));
        prev = u;
    }
    return s;
}

DecodedIndices decode_output_indices(const OutputIndexStream& stream) {
    const std::size_t r = stream.pair_count;
    if (2 * r > stream.size()) throw FormatError("index stream shorter than its pair count");
    DecodedIndices out;
    std::uint32_t prev = 0;
    for (std::size_t i = 0; i < r; ++i) {
        const std::uint8_t d0 = stream.deltas[2 * i];
        const std::uint8_t d1 = stream.deltas[2 * i + 1];
        if (i > 0 && d0 == 0) throw FormatError("pair columns must be strictly increasing");
        if (d1 == 0) throw FormatError("a pair needs two distinct columns");
        const std::uint32_t first = prev + d0;
        out.pairs.push_back({first, first + d1});
        prev = first;
    }
    prev = 0;
    for (std::size_t i = 2 * r; i < stream.size(); ++i) {
        const std::uint8_t d = stream.deltas[i];
        if (i > 2 * r && d == 0) throw FormatError("unique columns must be strictly increasing");
        prev += d;
        out.uniques.push_back(prev);
    }
    return out;
}

std::size_t CrossbarProgram::ou_count() const {
    std::size_t n = 0;
    for (const auto& t : tiles) {
        for (const auto& p : t.planes) n += p.ous.size();
    }
    return n;
}

std::size_t CrossbarProgram::plane_ou_count(int plane) const {
    std::size_t n = 0;
    for (const auto& t : tiles) n += t.planes.at(static_cast<std::size_t>(plane)).ous.size();
    return n;
}

std::vector<PlacedOU> place_ous(const reorder::CompressedPlane& plane) {
    std::map<std::uint32_t, std::uint32_t> band_slot;
    std::vector<std::uint32_t> used_cols;
    std::vector<PlacedOU> out;
    out.reserve(plane.ous.size());
    for (const auto& ou : plane.ous) {
        auto [it, fresh] = band_slot.try_emplace(ou.band, static_cast<std::uint32_t>(band_slot.size()));
        if (fresh) used_cols.push_back(0);
        out.push_back({ou, it->second, used_cols[it->second]++});
    }
    return out;
}

std::vector<TileRect> tile_layout(std::size_t rows, std::size_t cols, const Geometry& geometry) {
    geometry.validate();
    const std::size_t tr = geometry.tile_rows();
    const std::size_t tc = geometry.tile_cols();
    std::vector<TileRect> out;
    for (std::size_t r0 = 0; r0 < rows; r0 += tr) {
        for (std::size_t c0 = 0; c0 < cols; c0 += tc) {
            out.push_back({static_cast<std::uint32_t>(r0), static_cast<std::uint32_t>(c0),
                           static_cast<std::uint32_t>(std::min(tr, rows - r0)),
                           static_cast<std::uint32_t>(std::min(tc, cols - c0))});
        }
    }
    return out;
}

BitMatrix tile_plane(const Int8Matrix& weights, const TileRect& rect, int plane) {
    BitMatrix out(rect.rows, rect.cols);
    for (std::size_t r = 0; r < rect.rows; ++r) {
        for (std::size_t c = 0; c < rect.cols; ++c) {
            if (weight_bit(weights, rect.row_offset + r, rect.col_offset + c, plane)) out.set(r, c, true);
        }
    }
    return out;
}

std::uint32_t weight_checksum(const Int8Matrix& weights) {
    const auto& d = weights.data();
    return crc32({reinterpret_cast<const std::uint8_t*>(d.data()), d.size()});
}

CrossbarProgram build_program(const Int8Matrix& weights, const std::vector<TilePlan>& plans,
                              const Geometry& geometry, Direction direction) {
    geometry.validate();
    if (weights.empty()) throw std::invalid_argument("empty weight matrix");
    const auto layout = tile_layout(weights.rows(), weights.cols(), geometry);
    if (plans.size() != layout.size()) throw std::invalid_argument("tile plan count does not match the tiling");

    CrossbarProgram program;
    program.geometry = geometry;
    program.direction = direction;
    program.rows = static_cast<std::uint32_t>(weights.rows());
    program.cols = static_cast<std::uint32_t>(weights.cols());
    program.weight_crc = weight_checksum(weights);
    program.tiles.resize(plans.size());

    std::vector<std::string> overflows;
    for (std::size_t t = 0; t < plans.size(); ++t) {
        const auto& tp = plans[t];
        if (!(tp.rect == layout[t])) throw std::invalid_argument("tile plan rectangle does not match the tiling");
        auto& tile = program.tiles[t];
        tile.rect = tp.rect;
        for (int b = 0; b < kWeightBits; ++b) {
            const auto& compressed = tp.planes[static_cast<std::size_t>(b)];
            auto& plane = tile.planes[static_cast<std::size_t>(b)];
            plane.strategy = tp.strategies[static_cast<std::size_t>(b)];
            plane.image = BitMatrix(geometry.crossbar_rows, geometry.crossbar_cols);

            auto placed_ous = place_ous(compressed);
            std::size_t bands = 0;
            std::size_t widest = 0;
            bool overflow = false;
            for (const auto& placed : placed_ous) {
                const auto& ou = placed.ou;
                if (ou.active_rows.size() > geometry.ou_rows || ou.physical_columns() > geometry.ou_cols) {
                    throw std::invalid_argument("OU exceeds the configured OU dimensions at " + where(t, b));
                }
                bands = std::max<std::size_t>(bands, placed.slot_row + 1);
                widest = std::max<std::size_t>(widest, placed.slot_col + 1);
                if (placed.slot_row >= geometry.slot_rows() || placed.slot_col >= geometry.slot_cols()) overflow = true;
            }
            if (!overflow) {
                for (auto& placed : placed_ous) {
                    const auto& ou = placed.ou;
                    for (std::size_t k = 0; k < ou.active_rows.size(); ++k) {
                        const std::size_t r = tp.rect.row_offset + ou.active_rows[k];
                        for (std::size_t j = 0; j < ou.physical_columns(); ++j) {
                            const std::size_t c = tp.rect.col_offset + ou.stored_column(j);
                            if (weight_bit(weights, r, c, b)) {
                                plane.image.set(placed.slot_row * geometry.ou_rows + k,
                                                placed.slot_col * geometry.ou_cols + j, true);
                            }
                        }
                    }
                }
                plane.ous = std::move(placed_ous);
            }
            if (overflow) {
                overflows.push_back(where(t, b) + " (" + std::to_string(bands) + " bands, " +
                                    std::to_string(widest) +
                                    " OUs in the widest band; crossbar holds " +
                                    std::to_string(geometry.slot_rows()) + " x " +
                                    std::to_string(geometry.slot_cols()) + ")");
                continue;
            }

            // Every set bit of the tile plane is driven exactly once, and nothing else is.
            Matrix<std::uint8_t> hits(tp.rect.rows, tp.rect.cols, 0);
            for_each_driven_cell(geometry, TileRect{0, 0, tp.rect.rows, tp.rect.cols}, plane,
                                 [&](std::size_t r, std::size_t c) { ++hits(r, c); });
            for (std::size_t r = 0; r < tp.rect.rows; ++r) {
                for (std::size_t c = 0; c < tp.rect.cols; ++c) {
                    const bool bit = weight_bit(weights, tp.rect.row_offset + r, tp.rect.col_offset + c, b);
                    if (hits(r, c) != (bit ? 1 : 0)) {
                        throw std::logic_error("plan does not reproduce weight bits at " + where(t, b) + " cell (" +
                                               std::to_string(r) + ", " + std::to_string(c) + ")");
                    }
                }
            }
        }
    }
    if (!overflows.empty()) {
        std::ostringstream msg;
        msg << "plan exceeds crossbar capacity:";
        for (const auto& o : overflows) msg << "\n  " << o;
        throw CapacityError(msg.str());
    }
    return program;
}

Int8Matrix reconstruct_weights(const CrossbarProgram& program) {
    Matrix<std::uint8_t> bits(program.rows, program.cols, 0);
    for (const auto& tile : program.tiles) {
        for (int b = 0; b < kWeightBits; ++b) {
            for_each_driven_cell(program.geometry, tile.rect, tile.planes[static_cast<std::size_t>(b)],
                                 [&](std::size_t r, std::size_t c) { bits(r, c) |= std::uint8_t(1U << b); });
        }
    }
    Int8Matrix out(program.rows, program.cols, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) out.data()[i] = static_cast<std::int8_t>(bits.data()[i]);
    return out;
}

void validate_program(const CrossbarProgram& program) {
    const auto& g = program.geometry;
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("invalid geometry: ") + e.what());
    }
    const auto layout = tile_layout(program.rows, program.cols, g);
    if (layout.size() != program.tiles.size()) throw FormatError("tile count does not match the matrix shape");
    for (std::size_t t = 0; t < layout.size(); ++t) {
        const auto& tile = program.tiles[t];
        if (!(tile.rect == layout[t])) throw FormatError("tile rectangle does not match the matrix shape");
        for (int b = 0; b < kWeightBits; ++b) {
            const auto& plane = tile.planes[static_cast<std::size_t>(b)];
            if (plane.image.rows() != g.crossbar_rows || plane.image.cols() != g.crossbar_cols) {
                throw FormatError("crossbar image has the wrong size at " + where(t, b));
            }
            BitMatrix occupied(g.crossbar_rows, g.crossbar_cols);
            std::vector<std::uint8_t> slot_used(g.slots(), 0);
            for (const auto& placed : plane.ous) {
                const auto& ou = placed.ou;
                if (placed.slot_row >= g.slot_rows() || placed.slot_col >= g.slot_cols()) {
                    throw FormatError("OU slot out of range at " + where(t, b));
                }
                auto& used = slot_used[placed.slot_row * g.slot_cols() + placed.slot_col];
                if (used) throw FormatError("two OUs share a slot at " + where(t, b));
                used = 1;
                if (ou.rows.size() > g.ou_rows || ou.active_rows.size() > ou.rows.size() ||
                    ou.physical_columns() > g.ou_cols) {
                    throw FormatError("OU exceeds its dimensions at " + where(t, b));
                }
                for (auto r : ou.rows) {
                    if (r >= tile.rect.rows) throw FormatError("OU row out of range at " + where(t, b));
                }
                for (auto r : ou.active_rows) {
                    if (std::find(ou.rows.begin(), ou.rows.end(), r) == ou.rows.end()) {
                        throw FormatError("active row outside its band at " + where(t, b));
                    }
                }
                for (const auto& p : ou.pairs) {
                    if (p.first >= p.second || p.second >= tile.rect.cols) {
                        throw FormatError("pair column out of range at " + where(t, b));
                    }
                }
                for (auto u : ou.uniques) {
                    if (u >= tile.rect.cols) throw FormatError("column out of range at " + where(t, b));
                }
                for (std::size_t k = 0; k < ou.active_rows.size(); ++k) {
                    for (std::size_t j = 0; j < ou.physical_columns(); ++j) {
                        occupied.set(placed.slot_row * g.ou_rows + k, placed.slot_col * g.ou_cols + j, true);
                    }
                }
            }
            for (std::size_t c = 0; c < g.crossbar_cols; ++c) {
                const auto img = plane.image.column(c);
                const auto occ = occupied.column(c);
                for (std::size_t w = 0; w < img.size(); ++w) {
                    if (img[w] & ~occ[w]) throw FormatError("programmed cell outside every OU at " + where(t, b));
                }
            }
        }
    }
}

std::size_t index_bits(std::size_t n) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    return std::max<std::size_t>(1, bits);
}

std::uint64_t ou_index_bits(const reorder::OUAssignment& ou, std::size_t tile_rows) {
    return ou.active_rows.size() * index_bits(tile_rows) + ou.index_count() * kDeltaBits;
}

IndexOverhead index_overhead_bits(const CrossbarProgram& program) {
    IndexOverhead out;
    const std::size_t shift_bits = index_bits(kWeightBits);
    for (const auto& tile : program.tiles) {
        const std::size_t row_bits = index_bits(tile.rect.rows);
        for (const auto& plane : tile.planes) {
            for (const auto& placed : plane.ous) {
                out.row_routing_bits += placed.ou.active_rows.size() * row_bits;
                out.output_index_bits += placed.ou.index_count() * kDeltaBits;
                out.shift_record_bits += placed.ou.index_count() * shift_bits;
            }
        }
    }
    return out;
}

}  // namespace oumap::plan
