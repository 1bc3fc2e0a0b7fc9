// tensor_io.hpp — TensorFile format, pruning, int8 quantization, bit planes
//
// TensorFile layout (all integers little-endian):
//
//   offset  size       field
//   0       4          magic "OUFT"
//   4       2          version (u16, currently 1)
//   6       1          dtype (0 = f32, 1 = i8, 2 = i64)
//   7       1          rank (1..4)
//   8       4 × rank   dims (u32 each)
//   ...     payload    row-major values, product(dims) × sizeof(dtype)
//   end-4   4          CRC-32 (IEEE) of every preceding byte
//
// Rank > 2 tensors are flattened to a crossbar matrix by
// the `to_*_matrix` helpers: the leading dim is the output channel (matrix
// column) and the remaining dims, in row-major order, form the matrix row.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "oumap/bit_matrix.hpp"
#include "oumap/matrix.hpp"

namespace oumap {

/// Raised for malformed or unreadable tensor and plan files.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a file cannot be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kWeightBits = 8;

enum class DType : std::uint8_t { f32 = 0, i8 = 1, i64 = 2 };

std::size_t dtype_size(DType t);

struct TensorFile {
    static constexpr std::uint16_t kVersion = 1;

    DType dtype = DType::f32;
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> payload;  ///< raw little-endian values

    std::size_t element_count() const;

    static TensorFile from(const RealMatrix& m);
    static TensorFile from(const Int8Matrix& m);
    static TensorFile from(const Int64Matrix& m);

    std::vector<std::uint8_t> encode() const;
    static TensorFile decode(std::span<const std::uint8_t> bytes);
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

void write_tensor_file(const std::filesystem::path& path, const TensorFile& t);
TensorFile read_tensor_file(const std::filesystem::path& path);

/// Reads an OUFT file, or a NumPy .npy array (little-endian f4/i1/i8, C order).
TensorFile load_tensor_any(const std::filesystem::path& path);
TensorFile decode_npy(std::span<const std::uint8_t> bytes);

/// Writes `bytes` to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Flattens any rank to a 2-D crossbar matrix (see header comment).
RealMatrix to_real_matrix(const TensorFile& t);
Int8Matrix to_int8_matrix(const TensorFile& t);
Int64Matrix to_int64_matrix(const TensorFile& t);

struct QuantizedTensor {
    Int8Matrix values;
    double scale = 1.0;
    double sparsity = 0.0;  ///< zero count / element count

    static QuantizedTensor from_values(Int8Matrix values, double scale = 1.0);
};

/// Zeroes the floor(target·m·n) smallest-magnitude entries; ties go to the
/// lowest (row, col).
RealMatrix prune_magnitude(const RealMatrix& tensor, double target_sparsity);

/// Symmetric per-tensor quantization: scale = max|v| / 127.
QuantizedTensor quantize_i8(const RealMatrix& tensor);

double sparsity_of(const RealMatrix& m);
double sparsity_of(const Int8Matrix& m);

/// Plane i holds bit i of each two's-complement value; plane 7 is the sign.
struct BitPlaneSet {
    std::array<BitMatrix, kWeightBits> planes;

    std::size_t rows() const { return planes[0].rows(); }
    std::size_t cols() const { return planes[0].cols(); }

    /// value = -x7·2^7 + Σ_{i<7} x_i·2^i for every cell.
    Int8Matrix reconstruct() const;
};

BitPlaneSet to_bit_planes(const Int8Matrix& values);
inline BitPlaneSet to_bit_planes(const QuantizedTensor& q) { return to_bit_planes(q.values); }

}  // namespace oumap
