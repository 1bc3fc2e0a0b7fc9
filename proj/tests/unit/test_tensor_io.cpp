// test_tensor_io.cpp — TensorFile codec, npy import, pruning, quantization, bit planes
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "oumap/tensor_io.hpp"
#include "test_support.hpp"

using namespace oumap;

namespace {

RealMatrix real(std::size_t rows, std::size_t cols, std::vector<float> v) { return RealMatrix(rows, cols, std::move(v)); }

std::vector<std::uint8_t> npy_bytes(const std::string& descr, const std::string& shape, const void* data,
                                    std::size_t size) {
    std::string header = "{'descr': '" + descr + "', 'fortran_order': False, 'shape': " + shape + ", }";
    while ((10 + header.size() + 1) % 64 != 0) header += ' ';
    header += '\n';
    std::vector<std::uint8_t> out = {0x93, 'N', 'U', 'M', 'P', 'Y', 1, 0};
    out.push_back(static_cast<std::uint8_t>(header.size() & 0xFF));
    out.push_back(static_cast<std::uint8_t>(header.size() >> 8));
    out.insert(out.end(), header.begin(), header.end());
    const auto* p = static_cast<const std::uint8_t*>(data);
    out.insert(out.end(), p, p + size);
    return out;
}

}  // namespace

TEST_CASE("tensor file round trips every dtype") {
    const Int8Matrix i8(2, 3, std::vector<std::int8_t>{-128, -1, 0, 1, 64, 127});
    const Int64Matrix i64(1, 2, std::vector<std::int64_t>{-(std::int64_t{1} << 40), 7});
    const auto f32 = real(2, 2, {1.5f, -0.25f, 0.0f, 3.0f});

    CHECK(to_int8_matrix(TensorFile::decode(TensorFile::from(i8).encode())) == i8);
    CHECK(to_int64_matrix(TensorFile::decode(TensorFile::from(i64).encode())) == i64);
    CHECK(to_real_matrix(TensorFile::decode(TensorFile::from(f32).encode())) == f32);

    testing::ScratchDir dir;
    write_tensor_file(dir / "w.ouft", TensorFile::from(i8));
    CHECK(to_int8_matrix(read_tensor_file(dir / "w.ouft")) == i8);
}

TEST_CASE("tensor file header layout") {
    const auto bytes = TensorFile::from(Int8Matrix(3, 5, 1)).encode();
    REQUIRE(bytes.size() == 4 + 2 + 1 + 1 + 8 + 15 + 4);
    CHECK(std::memcmp(bytes.data(), "OUFT", 4) == 0);
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    CHECK(bytes[6] == static_cast<std::uint8_t>(DType::i8));
    CHECK(bytes[7] == 2);
    CHECK(bytes[8] == 3);
    CHECK(bytes[12] == 5);
}

TEST_CASE("corrupted tensor files are rejected") {
    auto bytes = TensorFile::from(Int8Matrix(4, 4, 3)).encode();
    SUBCASE("payload bit flip") {
        bytes[20] ^= 0x01;
        CHECK_THROWS_AS(TensorFile::decode(bytes), FormatError);
    }
    SUBCASE("truncated") {
        bytes.resize(bytes.size() - 5);
        CHECK_THROWS_AS(TensorFile::decode(bytes), FormatError);
    }
    SUBCASE("bad magic") {
        bytes[0] = 'X';
        CHECK_THROWS_AS(TensorFile::decode(bytes), FormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_tensor_file("/nonexistent/dir/none.ouft"), IoError);
    }
}

TEST_CASE("higher-rank tensors flatten with the output channel as column") {
    TensorFile t;
    t.dtype = DType::i8;
    t.dims = {16, 8, 3, 3};
    t.payload.resize(16 * 72);
    for (std::size_t i = 0; i < t.payload.size(); ++i) t.payload[i] = static_cast<std::uint8_t>(i % 251);
    const auto m = to_int8_matrix(t);
    REQUIRE(m.rows() == 72);
    REQUIRE(m.cols() == 16);
    for (std::size_t o = 0; o < 16; ++o) {
        for (std::size_t r = 0; r < 72; ++r) CHECK(m(r, o) == static_cast<std::int8_t>((o * 72 + r) % 251));
    }
}

TEST_CASE("npy arrays load like tensor files") {
    const std::int8_t v[6] = {1, -2, 3, -4, 5, -6};
    const auto t = decode_npy(npy_bytes("|i1", "(2, 3)", v, sizeof v));
    CHECK(to_int8_matrix(t) == Int8Matrix(2, 3, std::vector<std::int8_t>(v, v + 6)));

    const float f[2] = {0.5f, -1.0f};
    CHECK(to_real_matrix(decode_npy(npy_bytes("<f4", "(1, 2)", f, sizeof f))) == real(1, 2, {0.5f, -1.0f}));

    CHECK_THROWS_AS(decode_npy(npy_bytes("<f8", "(1,)", f, 8)), FormatError);
    CHECK_THROWS_AS(decode_npy(npy_bytes("|i1", "(2, 3)", v, 5)), FormatError);

    testing::ScratchDir dir;
    const auto bytes = npy_bytes("|i1", "(2, 3)", v, sizeof v);
    std::ofstream(dir / "a.npy", std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                                        static_cast<std::streamsize>(bytes.size()));
    CHECK(to_int8_matrix(load_tensor_any(dir / "a.npy")) == to_int8_matrix(t));
}

TEST_CASE("magnitude pruning") {
    CHECK(prune_magnitude(real(2, 2, {1.0f, -0.1f, 0.2f, 3.0f}), 0.5) == real(2, 2, {1.0f, 0.0f, 0.0f, 3.0f}));
    const auto any = real(2, 3, {0.5f, -2.0f, 0.0f, 7.0f, -0.125f, 1.0f});
    CHECK(prune_magnitude(any, 0.0) == any);
    CHECK(prune_magnitude(real(2, 2, {0.3f, 0.3f, 0.3f, 0.3f}), 0.25) == real(2, 2, {0.0f, 0.3f, 0.3f, 0.3f}));
    CHECK_THROWS_AS(prune_magnitude(any, 1.5), std::invalid_argument);
}

TEST_CASE("symmetric int8 quantization") {
    auto q = quantize_i8(real(1, 2, {127.0f, 0.0f}));
    CHECK(q.values == Int8Matrix(1, 2, std::vector<std::int8_t>{127, 0}));
    CHECK(q.scale == doctest::Approx(1.0));

    q = quantize_i8(real(1, 2, {-1.0f, 1.0f}));
    CHECK(q.values == Int8Matrix(1, 2, std::vector<std::int8_t>{-127, 127}));
    CHECK(q.scale == doctest::Approx(1.0 / 127.0));

    q = quantize_i8(real(1, 3, {0.5f, -0.25f, 1.0f}));
    std::vector<std::int8_t> expect;
    for (double v : {0.5, -0.25, 1.0}) expect.push_back(static_cast<std::int8_t>(std::round(v * 127.0 / 1.0)));
    CHECK(q.values == Int8Matrix(1, 3, expect));
    CHECK(q.sparsity == 0.0);
}

TEST_CASE("bit planes hold two's complement bits of every value") {
    Int8Matrix all(16, 16);
    for (int v = -128; v < 128; ++v) all.data()[static_cast<std::size_t>(v + 128)] = static_cast<std::int8_t>(v);
    const auto planes = to_bit_planes(all);
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto pattern = static_cast<std::uint8_t>(all.data()[i]);
        for (int b = 0; b < kWeightBits; ++b) {
            CHECK(planes.planes[b].get(i / 16, i % 16) == (((pattern >> b) & 1U) != 0));
        }
    }
    CHECK(planes.reconstruct() == all);

    const auto lone = [](std::int8_t v) { return to_bit_planes(Int8Matrix(1, 1, v)); };
    const auto min = lone(-128);
    CHECK(min.planes[7].get(0, 0));
    for (int b = 0; b < 7; ++b) CHECK_FALSE(min.planes[b].get(0, 0));
    for (const auto& p : lone(0).planes) CHECK_FALSE(p.get(0, 0));
    for (const auto& p : lone(-1).planes) CHECK(p.get(0, 0));
}
