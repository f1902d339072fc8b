#pragma once

#include <span>
#include <vector>

#include "hesynth/ring.hpp"

namespace hesynth {

// Maps a logical tensor grid into ciphertext slots. Grid cells are either
// packed (carry data) or padding; every slot outside the image of the packed
// cells holds the padding value 0.
struct LayoutDesc {
  std::vector<int> dims;
  std::vector<int> strides;     // same rank as dims
  int offset = 0;
  std::vector<uint8_t> packed;  // flattened grid, row-major; 1 = data cell

  static LayoutDesc row_major(std::vector<int> dims, int offset = 0);

  int rank() const { return static_cast<int>(dims.size()); }
  int grid_size() const;
  bool in_grid(std::span<const int> index) const;
  int flat_index(std::span<const int> index) const;  // row-major grid index
  int slot_of(std::span<const int> index) const;
  bool cell_packed(int flat) const { return packed[static_cast<size_t>(flat)] != 0; }

  // Per-slot data flags; packed cells must map injectively into [0, n).
  std::vector<uint8_t> packed_slots(int n) const;
  void validate(int n) const;

  bool operator==(const LayoutDesc&) const = default;
};

}  // namespace hesynth
