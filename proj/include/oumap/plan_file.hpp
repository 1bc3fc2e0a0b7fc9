// plan_file.hpp — binary CrossbarProgram file and its JSON summary
//
// Layout (little-endian):
//
//   "OUPL" | u16 version | u16 crossbar_rows | u16 crossbar_cols
//   u8 ou_rows | u8 ou_cols | u8 direction | u8 weight bits
//   u32 rows | u32 cols | u32 weight CRC-32 | u32 tile count
//   per tile:  u32 row_offset, col_offset, rows, cols
//     per plane (8):
//       u8 strategy | u32 OU count
//       per OU: u32 id | u32 band | u16 slot_row | u16 slot_col
//               u8 n + n × u16 band rows | u8 a + a × u16 active rows
//               u8 r | u8 L | L × u8 output index deltas
//       crossbar image, row-major, 1 bit per cell, LSB first
//   u32 CRC-32 of every preceding byte
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "oumap/ou_plan.hpp"

namespace oumap::plan {

inline constexpr std::uint16_t kPlanVersion = 1;

std::vector<std::uint8_t> encode_program(const CrossbarProgram& program);

/// Decodes and validates; throws FormatError on any inconsistency.
CrossbarProgram decode_program(std::span<const std::uint8_t> bytes);

void write_program(const std::filesystem::path& path, const CrossbarProgram& program);
CrossbarProgram read_program(const std::filesystem::path& path);

/// Human-readable summary written next to the binary plan.
std::string program_summary_json(const CrossbarProgram& program);

}  // namespace oumap::plan
