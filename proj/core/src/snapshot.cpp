#include "spide/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "spide/errors.hpp"

namespace spide {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'I', 'D', 'E', 'F', 'L', 'D'};

template <class T>
void put(std::vector<unsigned char>& buf, T value) {
  static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.insert(buf.end(), bytes, bytes + sizeof(T));
}

template <class T>
T take(const std::vector<unsigned char>& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw IoError("snapshot truncated");
  T value;
  std::memcpy(&value, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

std::vector<unsigned char> encode_snapshot(const std::vector<Field>& slices, bool complex_values) {
  if (slices.empty()) throw ShapeError("snapshot needs at least one slice");
  const SpectralGrid& grid = slices.front().grid();
  std::vector<unsigned char> buf(kMagic, kMagic + 8);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(grid.dim()));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(grid.nodes()));
  put<double>(buf, grid.half_width());
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(slices.size()));
  put<std::uint32_t>(buf, complex_values ? 1u : 0u);
  for (const auto& slice : slices) {
    if (!(slice.grid() == grid)) throw ShapeError("snapshot slices must share one grid");
    Field phys = to_physical(slice);
    for (const auto& v : phys.values()) {
      put<double>(buf, v.real());
      if (complex_values) put<double>(buf, v.imag());
    }
  }
  return buf;
}

void write_snapshot(const std::filesystem::path& path, const std::vector<Field>& slices, bool complex_values) {
  auto buf = encode_snapshot(slices, complex_values);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 32 || std::memcmp(buf.data(), kMagic, 8) != 0) throw IoError("not a field snapshot: " + path.string());
  std::size_t pos = 8;
  auto d = take<std::uint32_t>(buf, pos);
  auto n = take<std::uint32_t>(buf, pos);
  auto half_width = take<double>(buf, pos);
  auto count = take<std::uint32_t>(buf, pos);
  auto is_complex = take<std::uint32_t>(buf, pos) != 0;
  Snapshot snap{SpectralGrid(static_cast<int>(d), static_cast<int>(n), half_width), is_complex, {}};
  for (std::uint32_t s = 0; s < count; ++s) {
    Field f(snap.grid);
    for (auto& v : f.values()) {
      double re = take<double>(buf, pos);
      double im = is_complex ? take<double>(buf, pos) : 0.0;
      v = {re, im};
    }
    snap.slices.push_back(std::move(f));
  }
  if (pos != buf.size()) throw IoError("trailing bytes in snapshot " + path.string());
  return snap;
}

}  // namespace spide
