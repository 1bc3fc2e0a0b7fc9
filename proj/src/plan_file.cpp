// plan_file.cpp — OUPL encoder/decoder and JSON summary
#include "oumap/plan_file.hpp"

#include <cstring>

#include <json.hpp>

namespace oumap::plan {

namespace {

constexpr char kMagic[4] = {'O', 'U', 'P', 'L'};

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    void u8(std::uint64_t v) { put(v, 1); }
    void u16(std::uint64_t v) { put(v, 2); }
    void u32(std::uint64_t v) { put(v, 4); }
    std::vector<std::uint8_t>& data() { return out_; }

private:
    void put(std::uint64_t v, int width) {
        if (width < 8 && (v >> (8 * width)) != 0) throw std::invalid_argument("value does not fit the plan encoding");
        for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
    std::uint32_t u8() { return static_cast<std::uint32_t>(get(1)); }
    std::uint32_t u16() { return static_cast<std::uint32_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::span<const std::uint8_t> take(std::size_t n) {
        need(n);
        auto s = b_.subspan(at_, n);
        at_ += n;
        return s;
    }
    bool done() const { return at_ == b_.size(); }

private:
    void need(std::size_t n) const {
        if (b_.size() - at_ < n) throw FormatError("plan file truncated");
    }
    std::uint64_t get(int width) {
        need(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v |= std::uint64_t{b_[at_ + i]} << (8 * i);
        at_ += static_cast<std::size_t>(width);
        return v;
    }
    std::span<const std::uint8_t> b_;
    std::size_t at_ = 0;
};

void write_image(Writer& w, const BitMatrix& image) {
    std::vector<std::uint8_t> packed((image.rows() * image.cols() + 7) / 8, 0);
    std::size_t i = 0;
    for (std::size_t r = 0; r < image.rows(); ++r) {
        for (std::size_t c = 0; c < image.cols(); ++c, ++i) {
            if (image.get(r, c)) packed[i >> 3] |= static_cast<std::uint8_t>(1U << (i & 7));
        }
    }
    w.bytes(packed.data(), packed.size());
}

BitMatrix read_image(Reader& rd, std::size_t rows, std::size_t cols) {
    const auto packed = rd.take((rows * cols + 7) / 8);
    BitMatrix image(rows, cols);
    std::size_t i = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c, ++i) {
            if ((packed[i >> 3] >> (i & 7)) & 1U) image.set(r, c, true);
        }
    }
    return image;
}

}  // namespace

std::vector<std::uint8_t> encode_program(const CrossbarProgram& program) {
    const auto& g = program.geometry;
    Writer w;
    w.bytes(kMagic, 4);
    w.u16(kPlanVersion);
    w.u16(g.crossbar_rows);
    w.u16(g.crossbar_cols);
    w.u8(g.ou_rows);
    w.u8(g.ou_cols);
    w.u8(program.direction == Direction::horizontal ? 0 : 1);
    w.u8(kWeightBits);
    w.u32(program.rows);
    w.u32(program.cols);
    w.u32(program.weight_crc);
    w.u32(program.tiles.size());
    for (const auto& tile : program.tiles) {
        w.u32(tile.rect.row_offset);
        w.u32(tile.rect.col_offset);
        w.u32(tile.rect.rows);
        w.u32(tile.rect.cols);
        for (const auto& plane : tile.planes) {
            w.u8(static_cast<std::uint8_t>(plane.strategy));
            w.u32(plane.ous.size());
            for (const auto& placed : plane.ous) {
                const auto& ou = placed.ou;
                w.u32(ou.ou_id);
                w.u32(ou.band);
                w.u16(placed.slot_row);
                w.u16(placed.slot_col);
                w.u8(ou.rows.size());
                for (auto r : ou.rows) w.u16(r);
                w.u8(ou.active_rows.size());
                for (auto r : ou.active_rows) w.u16(r);
                const auto stream = encode_output_indices(ou);
                w.u8(stream.pair_count);
                w.u8(stream.size());
                w.bytes(stream.deltas.data(), stream.size());
            }
            write_image(w, plane.image);
        }
    }
    auto& out = w.data();
    const std::uint32_t crc = crc32(out);
    w.u32(crc);
    return std::move(out);
}

CrossbarProgram decode_program(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("not a plan file (bad magic)");
    const auto body = bytes.first(bytes.size() - 4);
    Reader tail(bytes.last(4));
    if (crc32(body) != tail.u32()) throw FormatError("plan file checksum mismatch");

    Reader rd(body);
    rd.take(4);
    if (const auto v = rd.u16(); v != kPlanVersion) {
        throw FormatError("unsupported plan version " + std::to_string(v));
    }
    CrossbarProgram p;
    p.geometry.crossbar_rows = rd.u16();
    p.geometry.crossbar_cols = rd.u16();
    p.geometry.ou_rows = rd.u8();
    p.geometry.ou_cols = rd.u8();
    const auto dir = rd.u8();
    if (dir > 1) throw FormatError("invalid direction code");
    p.direction = dir == 0 ? Direction::horizontal : Direction::vertical;
    if (rd.u8() != kWeightBits) throw FormatError("unsupported weight bit width");
    p.rows = rd.u32();
    p.cols = rd.u32();
    p.weight_crc = rd.u32();
    const auto tiles = rd.u32();
    if (p.geometry.ou_rows == 0 || p.geometry.ou_cols == 0) throw FormatError("invalid OU geometry");
    // Every tile needs at least its header and eight images, so a bogus count fails fast.
    if (tiles > body.size()) throw FormatError("tile count exceeds file size");
    p.tiles.resize(tiles);
    for (auto& tile : p.tiles) {
        tile.rect.row_offset = rd.u32();
        tile.rect.col_offset = rd.u32();
        tile.rect.rows = rd.u32();
        tile.rect.cols = rd.u32();
        for (auto& plane : tile.planes) {
            const auto strategy = rd.u8();
            if (strategy > 1) throw FormatError("invalid plane strategy");
            plane.strategy = static_cast<Strategy>(strategy);
            const auto count = rd.u32();
            if (count > body.size()) throw FormatError("OU count exceeds file size");
            plane.ous.reserve(count);
            for (std::uint32_t i = 0; i < count; ++i) {
                PlacedOU placed;
                auto& ou = placed.ou;
                ou.ou_id = rd.u32();
                ou.band = rd.u32();
                placed.slot_row = rd.u16();
                placed.slot_col = rd.u16();
                ou.rows.resize(rd.u8());
                for (auto& r : ou.rows) r = rd.u16();
                ou.active_rows.resize(rd.u8());
                for (auto& r : ou.active_rows) r = rd.u16();
                OutputIndexStream stream;
                stream.pair_count = rd.u8();
                const auto len = rd.u8();
                const auto d = rd.take(len);
                stream.deltas.assign(d.begin(), d.end());
                auto decoded = decode_output_indices(stream);
                ou.pairs = std::move(decoded.pairs);
                ou.uniques = std::move(decoded.uniques);
                ou.padding = ou.rows.size() < p.geometry.ou_rows ? p.geometry.ou_rows - ou.rows.size() : 0;
                plane.ous.push_back(std::move(placed));
            }
            plane.image = read_image(rd, p.geometry.crossbar_rows, p.geometry.crossbar_cols);
        }
    }
    if (!rd.done()) throw FormatError("trailing bytes in plan file");
    validate_program(p);
    return p;
}

void write_program(const std::filesystem::path& path, const CrossbarProgram& program) {
    write_file_atomic(path, encode_program(program));
}

CrossbarProgram read_program(const std::filesystem::path& path) { return decode_program(read_file(path)); }

std::string program_summary_json(const CrossbarProgram& program) {
    using nlohmann::json;
    const auto& g = program.geometry;
    json j;
    j["format"] = "OUPL";
    j["version"] = kPlanVersion;
    j["geometry"] = {{"crossbar_rows", g.crossbar_rows},
                     {"crossbar_cols", g.crossbar_cols},
                     {"ou_rows", g.ou_rows},
                     {"ou_cols", g.ou_cols},
                     {"slots", g.slots()}};
    j["direction"] = to_string(program.direction);
    j["shape"] = {program.rows, program.cols};
    j["weight_crc32"] = program.weight_crc;
    j["ou_count"] = program.ou_count();
    const auto overhead = index_overhead_bits(program);
    j["index_bits"] = {{"row_routing", overhead.row_routing_bits},
                       {"output_indices", overhead.output_index_bits},
                       {"total", overhead.total()},
                       {"same_crossbar_total", overhead.same_crossbar_total()}};
    json tiles = json::array();
    for (const auto& tile : program.tiles) {
        json t;
        t["row_offset"] = tile.rect.row_offset;
        t["col_offset"] = tile.rect.col_offset;
        t["rows"] = tile.rect.rows;
        t["cols"] = tile.rect.cols;
        json planes = json::array();
        for (int b = 0; b < kWeightBits; ++b) {
            const auto& plane = tile.planes[static_cast<std::size_t>(b)];
            std::size_t active = 0;
            std::size_t pairs = 0;
            for (const auto& placed : plane.ous) {
                active += placed.ou.active_rows.size();
                pairs += placed.ou.pairs.size();
            }
            planes.push_back({{"plane", b},
                              {"strategy", to_string(plane.strategy)},
                              {"ous", plane.ous.size()},
                              {"active_rows", active},
                              {"pairs", pairs}});
        }
        t["planes"] = std::move(planes);
        tiles.push_back(std::move(t));
    }
    j["tiles"] = std::move(tiles);
    return j.dump(2);
}

}  // namespace oumap::plan
