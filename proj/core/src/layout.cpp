#include "hesynth/layout.hpp"

namespace hesynth {

LayoutDesc LayoutDesc::row_major(std::vector<int> dims, int offset) {
  LayoutDesc l;
  l.dims = std::move(dims);
  l.strides.assign(l.dims.size(), 1);
  for (int d = static_cast<int>(l.dims.size()) - 2; d >= 0; --d)
    l.strides[d] = l.strides[d + 1] * l.dims[d + 1];
  l.offset = offset;
  int size = 1;
  for (int d : l.dims) size *= d;
  l.packed.assign(static_cast<size_t>(size), 1);
  return l;
}

int LayoutDesc::grid_size() const {
  int size = 1;
  for (int d : dims) size *= d;
  return size;
}

bool LayoutDesc::in_grid(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != rank()) return false;
  for (int d = 0; d < rank(); ++d)
    if (index[d] < 0 || index[d] >= dims[d]) return false;
  return true;
}

int LayoutDesc::flat_index(std::span<const int> index) const {
  int flat = 0;
  for (int d = 0; d < rank(); ++d) flat = flat * dims[d] + index[d];
  return flat;
}

int LayoutDesc::slot_of(std::span<const int> index) const {
  int slot = offset;
  for (int d = 0; d < rank(); ++d) slot += index[d] * strides[d];
  return slot;
}

std::vector<uint8_t> LayoutDesc::packed_slots(int n) const {
  std::vector<uint8_t> out(static_cast<size_t>(n), 0);
  std::vector<int> idx(dims.size(), 0);
  const int size = grid_size();
  for (int flat = 0; flat < size; ++flat) {
    if (cell_packed(flat)) {
      int slot = slot_of(idx);
      if (slot < 0 || slot >= n) throw StructuralError("layout: packed cell maps outside [0, n)");
      if (out[static_cast<size_t>(slot)]) throw StructuralError("layout: packing is not injective");
      out[static_cast<size_t>(slot)] = 1;
    }
    for (int d = rank() - 1; d >= 0; --d) {
      if (++idx[d] < dims[d]) break;
      idx[d] = 0;
    }
  }
  return out;
}

void LayoutDesc::validate(int n) const {
  if (dims.empty()) throw StructuralError("layout: empty dims");
  if (strides.size() != dims.size()) throw StructuralError("layout: rank mismatch");
  for (int d : dims)
    if (d <= 0) throw StructuralError("layout: non-positive dim");
  if (packed.size() != static_cast<size_t>(grid_size()))
    throw StructuralError("layout: packed flag size mismatch");
  (void)packed_slots(n);  // checks range and injectivity
}

}  // namespace hesynth
