// tensor_io.cpp — TensorFile codec, .npy reader, pruning and quantization
#include "oumap/tensor_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <regex>

namespace oumap {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'O', 'U', 'F', 'T'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
    return v;
}

template <typename T>
void append_le(std::vector<std::uint8_t>& out, T v) {
    static_assert(std::endian::native == std::endian::little, "little-endian host required");
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T read_le(const std::uint8_t* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return v;
}

std::pair<std::size_t, std::size_t> matrix_shape(const TensorFile& t) {
    if (t.dims.empty()) throw FormatError("tensor has rank 0");
    if (t.dims.size() == 1) return {t.dims[0], 1};
    std::size_t inner = 1;
    for (std::size_t i = 1; i < t.dims.size(); ++i) inner *= t.dims[i];
    if (t.dims.size() == 2) return {t.dims[0], t.dims[1]};
    return {inner, t.dims[0]};
}

/// Maps flat payload index → (row, col) of the crossbar matrix.
template <typename T, typename Read>
Matrix<T> flatten(const TensorFile& t, Read read) {
    auto [rows, cols] = matrix_shape(t);
    Matrix<T> m(rows, cols);
    const std::size_t n = t.element_count();
    if (t.dims.size() <= 2) {
        for (std::size_t i = 0; i < n; ++i) m.data()[i] = read(i);
    } else {
        // (out, rest...) row-major → rest is the row, out is the column.
        const std::size_t inner = rows;
        for (std::size_t o = 0; o < cols; ++o) {
            for (std::size_t r = 0; r < inner; ++r) m(r, o) = read(o * inner + r);
        }
    }
    return m;
}

}  // namespace

std::size_t dtype_size(DType t) {
    switch (t) {
        case DType::f32: return 4;
        case DType::i8: return 1;
        case DType::i64: return 8;
    }
    throw FormatError("unknown dtype");
}

std::size_t TensorFile::element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return dims.empty() ? 0 : n;
}

TensorFile TensorFile::from(const RealMatrix& m) {
    TensorFile t;
    t.dtype = DType::f32;
    t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
    t.payload.reserve(m.size() * 4);
    for (float v : m.data()) append_le(t.payload, v);
    return t;
}

TensorFile TensorFile::from(const Int8Matrix& m) {
    TensorFile t;
    t.dtype = DType::i8;
    t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
    t.payload.reserve(m.size());
    for (auto v : m.data()) t.payload.push_back(static_cast<std::uint8_t>(v));
    return t;
}

TensorFile TensorFile::from(const Int64Matrix& m) {
    TensorFile t;
    t.dtype = DType::i64;
    t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
    t.payload.reserve(m.size() * 8);
    for (auto v : m.data()) append_le(t.payload, v);
    return t;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    uLong c = ::crc32(0L, Z_NULL, 0);
    // zlib takes a uInt length; feed in bounded chunks.
    std::size_t off = 0;
    while (off < bytes.size()) {
        const std::size_t len = std::min<std::size_t>(bytes.size() - off, 1U << 30);
        c = ::crc32(c, bytes.data() + off, static_cast<uInt>(len));
        off += len;
    }
    return static_cast<std::uint32_t>(c);
}

std::vector<std::uint8_t> TensorFile::encode() const {
    if (dims.empty() || dims.size() > 4) throw FormatError("rank must be in 1..4");
    if (payload.size() != element_count() * dtype_size(dtype)) {
        throw FormatError("payload length does not match dims × dtype size");
    }
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    put_u16(out, kVersion);
    out.push_back(static_cast<std::uint8_t>(dtype));
    out.push_back(static_cast<std::uint8_t>(dims.size()));
    for (auto d : dims) put_u32(out, d);
    out.insert(out.end(), payload.begin(), payload.end());
    put_u32(out, crc32(out));
    return out;
}

TensorFile TensorFile::decode(std::span<const std::uint8_t> b) {
    if (b.size() < 12 || !std::equal(kMagic.begin(), kMagic.end(), b.begin())) {
        throw FormatError("not an OUFT tensor file");
    }
    const std::uint16_t version = static_cast<std::uint16_t>(b[4] | (b[5] << 8));
    if (version != kVersion) throw FormatError("unsupported OUFT version " + std::to_string(version));
    TensorFile t;
    if (b[6] > 2) throw FormatError("unknown dtype tag " + std::to_string(b[6]));
    t.dtype = static_cast<DType>(b[6]);
    const std::size_t rank = b[7];
    if (rank == 0 || rank > 4) throw FormatError("rank must be in 1..4");
    const std::size_t header = 8 + 4 * rank;
    if (b.size() < header + 4) throw FormatError("truncated OUFT header");
    for (std::size_t i = 0; i < rank; ++i) t.dims.push_back(get_u32(b, 8 + 4 * i));
    const std::size_t expect = t.element_count() * dtype_size(t.dtype);
    if (b.size() != header + expect + 4) throw FormatError("OUFT payload length mismatch");
    const std::uint32_t stored = get_u32(b, b.size() - 4);
    if (stored != crc32(b.first(b.size() - 4))) throw FormatError("OUFT checksum mismatch");
    t.payload.assign(b.begin() + static_cast<std::ptrdiff_t>(header), b.end() - 4);
    return t;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename into " + path.string() + ": " + ec.message());
}

void write_tensor_file(const std::filesystem::path& path, const TensorFile& t) {
    write_file_atomic(path, t.encode());
}

TensorFile read_tensor_file(const std::filesystem::path& path) {
    return TensorFile::decode(read_file(path));
}

TensorFile decode_npy(std::span<const std::uint8_t> b) {
    static constexpr std::array<std::uint8_t, 6> npy_magic = {0x93, 'N', 'U', 'M', 'P', 'Y'};
    if (b.size() < 10 || !std::equal(npy_magic.begin(), npy_magic.end(), b.begin())) {
        throw FormatError("not a .npy file");
    }
    const int major = b[6];
    std::size_t hlen = 0;
    std::size_t hstart = 0;
    if (major == 1) {
        hlen = b[8] | (b[9] << 8);
        hstart = 10;
    } else if (major == 2 || major == 3) {
        if (b.size() < 12) throw FormatError("truncated .npy header");
        hlen = get_u32(b, 8);
        hstart = 12;
    } else {
        throw FormatError("unsupported .npy version");
    }
    if (b.size() < hstart + hlen) throw FormatError("truncated .npy header");
    const std::string header(b.begin() + static_cast<std::ptrdiff_t>(hstart),
                             b.begin() + static_cast<std::ptrdiff_t>(hstart + hlen));

    std::smatch m;
    static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
    static const std::regex order_re(R"('fortran_order'\s*:\s*(True|False))");
    static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
    if (!std::regex_search(header, m, descr_re)) throw FormatError(".npy header has no descr");
    const std::string descr = m[1];
    if (!std::regex_search(header, m, order_re)) throw FormatError(".npy header has no fortran_order");
    if (m[1] == "True") throw FormatError("Fortran-ordered .npy arrays are not supported");
    if (!std::regex_search(header, m, shape_re)) throw FormatError(".npy header has no shape");

    TensorFile t;
    const std::string shape = m[1];
    static const std::regex num_re(R"(\d+)");
    for (auto it = std::sregex_iterator(shape.begin(), shape.end(), num_re); it != std::sregex_iterator(); ++it) {
        t.dims.push_back(static_cast<std::uint32_t>(std::stoul(it->str())));
    }
    if (t.dims.empty() || t.dims.size() > 4) throw FormatError(".npy rank must be in 1..4");

    std::size_t src_size = 0;
    if (descr == "<f4") {
        t.dtype = DType::f32;
        src_size = 4;
    } else if (descr == "|i1" || descr == "<i1") {
        t.dtype = DType::i8;
        src_size = 1;
    } else if (descr == "<i8") {
        t.dtype = DType::i64;
        src_size = 8;
    } else {
        throw FormatError("unsupported .npy dtype " + descr);
    }
    const std::size_t data_start = hstart + hlen;
    if (b.size() - data_start != t.element_count() * src_size) throw FormatError(".npy payload length mismatch");
    t.payload.assign(b.begin() + static_cast<std::ptrdiff_t>(data_start), b.end());
    return t;
}

TensorFile load_tensor_any(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (bytes.size() >= 4 && std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
        return TensorFile::decode(bytes);
    }
    return decode_npy(bytes);
}

RealMatrix to_real_matrix(const TensorFile& t) {
    const std::uint8_t* p = t.payload.data();
    switch (t.dtype) {
        case DType::f32: return flatten<float>(t, [p](std::size_t i) { return read_le<float>(p + 4 * i); });
        case DType::i8:
            return flatten<float>(t, [p](std::size_t i) { return static_cast<float>(static_cast<std::int8_t>(p[i])); });
        case DType::i64:
            return flatten<float>(t, [p](std::size_t i) { return static_cast<float>(read_le<std::int64_t>(p + 8 * i)); });
    }
    throw FormatError("unknown dtype");
}

Int8Matrix to_int8_matrix(const TensorFile& t) {
    if (t.dtype != DType::i8) throw FormatError("expected an i8 tensor");
    const std::uint8_t* p = t.payload.data();
    return flatten<std::int8_t>(t, [p](std::size_t i) { return static_cast<std::int8_t>(p[i]); });
}

Int64Matrix to_int64_matrix(const TensorFile& t) {
    if (t.dtype != DType::i64) throw FormatError("expected an i64 tensor");
    const std::uint8_t* p = t.payload.data();
    return flatten<std::int64_t>(t, [p](std::size_t i) { return read_le<std::int64_t>(p + 8 * i); });
}

double sparsity_of(const RealMatrix& m) {
    if (m.empty()) return 0.0;
    const auto zeros = std::count(m.data().begin(), m.data().end(), 0.0F);
    return static_cast<double>(zeros) / static_cast<double>(m.size());
}

double sparsity_of(const Int8Matrix& m) {
    if (m.empty()) return 0.0;
    const auto zeros = std::count(m.data().begin(), m.data().end(), std::int8_t{0});
    return static_cast<double>(zeros) / static_cast<double>(m.size());
}

QuantizedTensor QuantizedTensor::from_values(Int8Matrix values, double scale) {
    QuantizedTensor q;
    q.sparsity = sparsity_of(values);
    q.values = std::move(values);
    q.scale = scale;
    return q;
}

RealMatrix prune_magnitude(const RealMatrix& tensor, double target_sparsity) {
    if (tensor.empty()) throw std::invalid_argument("empty input");
    if (!(target_sparsity >= 0.0 && target_sparsity <= 1.0)) {
        throw std::invalid_argument("target_sparsity must be in [0, 1]");
    }
    const std::size_t n = tensor.size();
    const auto k = std::min(n, static_cast<std::size_t>(std::floor(target_sparsity * static_cast<double>(n) + 1e-9)));
    RealMatrix out = tensor;
    if (k == 0) return out;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& v = tensor.data();
    // Flat index order is (row, col) lexicographic order.
    std::stable_sort(order.begin(), order.end(),
                     [&v](std::size_t a, std::size_t b) { return std::fabs(v[a]) < std::fabs(v[b]); });
    for (std::size_t i = 0; i < k; ++i) out.data()[order[i]] = 0.0F;
    return out;
}

QuantizedTensor quantize_i8(const RealMatrix& tensor) {
    if (tensor.empty()) throw std::invalid_argument("empty input");
    double max_abs = 0.0;
    for (float v : tensor.data()) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite weight value");
        max_abs = std::max(max_abs, std::fabs(static_cast<double>(v)));
    }
    Int8Matrix q(tensor.rows(), tensor.cols(), 0);
    if (max_abs == 0.0) return QuantizedTensor::from_values(std::move(q), 1.0);

    for (std::size_t i = 0; i < tensor.size(); ++i) {
        const double v = tensor.data()[i];
        if (v == 0.0) continue;
        double code = std::round(v * 127.0 / max_abs);
        code = std::clamp(code, -128.0, 127.0);
        // A nonzero weight never collapses to zero.
        if (code == 0.0) code = v > 0.0 ? 1.0 : -1.0;
        q.data()[i] = static_cast<std::int8_t>(code);
    }
    return QuantizedTensor::from_values(std::move(q), max_abs / 127.0);
}

BitPlaneSet to_bit_planes(const Int8Matrix& values) {
    BitPlaneSet set;
    for (auto& p : set.planes) p = BitMatrix(values.rows(), values.cols());
    for (std::size_t r = 0; r < values.rows(); ++r) {
        for (std::size_t c = 0; c < values.cols(); ++c) {
            const auto u = static_cast<std::uint8_t>(values(r, c));
            for (int b = 0; b < kWeightBits; ++b) set.planes[b].set(r, c, (u >> b) & 1U);
        }
    }
    return set;
}

Int8Matrix BitPlaneSet::reconstruct() const {
    Int8Matrix out(rows(), cols(), 0);
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t c = 0; c < cols(); ++c) {
            int v = planes[kWeightBits - 1].get(r, c) ? -(1 << (kWeightBits - 1)) : 0;
            for (int b = 0; b < kWeightBits - 1; ++b) {
                if (planes[b].get(r, c)) v += 1 << b;
            }
            out(r, c) = static_cast<std::int8_t>(v);
        }
    }
    return out;
}

}  // namespace oumap
