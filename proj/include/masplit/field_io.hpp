#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "masplit/field.hpp"
#include "masplit/matfield.hpp"

namespace masplit {

// Binary field dump, little-endian:
//   offset 0  char[6] "MAFLD\0"
//   offset 6  u16     version (1)
//   offset 8  u16     component count
//   offset 10 u16     reserved (0)
//   offset 12 u32     n
//   offset 16 f64[n*n] per component, row-major
inline constexpr std::uint16_t kFieldDumpVersion = 1;

void write_fields(const std::filesystem::path& path, const std::vector<ScalarField>& components);
std::vector<ScalarField> read_fields(const std::filesystem::path& path);

void write_field(const std::filesystem::path& path, const ScalarField& field);
void write_field(const std::filesystem::path& path, const SymMatrixField& field);
/// Reads a one-component dump.
ScalarField read_scalar_field(const std::filesystem::path& path);
/// Reads a three-component dump (p11, p12, p22).
SymMatrixField read_matrix_field(const std::filesystem::path& path);

}  // namespace masplit
