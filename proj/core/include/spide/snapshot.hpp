#pragma once

#include <filesystem>
#include <vector>

#include "spide/spectral_grid.hpp"

namespace spide {

// Field snapshot (.sfld): 32-byte header ("SPIDEFLD", u32 d, u32 N, f64 L,
// u32 slice count, u32 complex flag) followed by little-endian float64
// values, row-major, slice after slice. Complex data interleaves (re, im).
struct Snapshot {
  SpectralGrid grid;
  bool complex_values = false;
  std::vector<Field> slices;  // physical domain
};

std::vector<unsigned char> encode_snapshot(const std::vector<Field>& slices, bool complex_values = false);
void write_snapshot(const std::filesystem::path& path, const std::vector<Field>& slices, bool complex_values = false);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace spide
