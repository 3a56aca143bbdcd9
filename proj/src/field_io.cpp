#include "masplit/field_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "masplit/errors.hpp"

namespace masplit {

namespace {

static_assert(std::endian::native == std::endian::little,
              "field dumps are written with native little-endian byte order");

constexpr std::array<char, 6> kMagic{'M', 'A', 'F', 'L', 'D', '\0'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::filesystem::path& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw IoError("truncated field dump: " + path.string());
  }
  return v;
}

}  // namespace

void write_fields(const std::filesystem::path& path, const std::vector<ScalarField>& components) {
  if (components.empty()) throw InvalidArgument("write_fields: no components");
  const int n = components.front().n();
  for (const auto& c : components) require_same_grid(n, c.n(), "write_fields");

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.write(kMagic.data(), kMagic.size());
  put<std::uint16_t>(os, kFieldDumpVersion);
  put<std::uint16_t>(os, static_cast<std::uint16_t>(components.size()));
  put<std::uint16_t>(os, 0);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(n));
  for (const auto& c : components) {
    os.write(reinterpret_cast<const char*>(c.values().data()),
             static_cast<std::streamsize>(c.size() * sizeof(double)));
  }
  if (!os) throw IoError("write failed: " + path.string());
}

std::vector<ScalarField> read_fields(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open field dump: " + path.string());
  std::array<char, 6> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) {
    throw IoError("not a field dump (bad magic): " + path.string());
  }
  const auto version = get<std::uint16_t>(is, path);
  if (version != kFieldDumpVersion) {
    throw IoError("unsupported field dump version " + std::to_string(version));
  }
  const auto count = get<std::uint16_t>(is, path);
  get<std::uint16_t>(is, path);
  const auto n = get<std::uint32_t>(is, path);
  if (count == 0) throw IoError("field dump has no components: " + path.string());
  if (n > 1u << 15) throw IoError("implausible grid size in " + path.string());

  std::vector<ScalarField> out;
  out.reserve(count);
  const std::size_t per = static_cast<std::size_t>(n) * n;
  for (int c = 0; c < count; ++c) {
    std::vector<double> values(per);
    if (!is.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(per * sizeof(double)))) {
      throw IoError("truncated field dump: " + path.string());
    }
    out.emplace_back(static_cast<int>(n), std::move(values));
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw IoError("trailing bytes after field data: " + path.string());
  }
  return out;
}

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  write_fields(path, {field});
}

void write_field(const std::filesystem::path& path, const SymMatrixField& field) {
  write_fields(path, {field.p11, field.p12, field.p22});
}

ScalarField read_scalar_field(const std::filesystem::path& path) {
  auto comps = read_fields(path);
  if (comps.size() != 1) {
    throw IoError("expected a scalar (1-component) dump, got " + std::to_string(comps.size()) +
                  " components: " + path.string());
  }
  return std::move(comps.front());
}

SymMatrixField read_matrix_field(const std::filesystem::path& path) {
  auto comps = read_fields(path);
  if (comps.size() != 3) {
    throw IoError("expected a matrix (3-component) dump, got " + std::to_string(comps.size()) +
                  " components: " + path.string());
  }
  return {std::move(comps[0]), std::move(comps[1]), std::move(comps[2])};
}

}  // namespace masplit
