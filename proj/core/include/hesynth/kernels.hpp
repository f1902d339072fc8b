#pragma once

#include <string>
#include <vector>

#include "hesynth/kernel_spec.hpp"

namespace hesynth {

// Size parameters for the benchmark kernel builders. Zeroed fields take the
// kernel's default. Image extents include the zero-padding border.
struct KernelConfig {
  std::string kernel;
  int n = 0;
  uint32_t t = 65537;
  int length = 0;
  int image_h = 0;
  int image_w = 0;
  bool ct_coeffs = false;  // regression kernels: coefficients as ciphertexts

  bool operator==(const KernelConfig&) const = default;
};

const std::vector<std::string>& benchmark_kernel_names();

KernelConfig kernel_defaults(const std::string& name);

// Builds the named benchmark kernel at the configured sizes. Rejects unknown
// names, non-power-of-two n and sizes that do not fit the slot count.
KernelSpec build_kernel(const KernelConfig& config);

// Plain reduction over `length` packed slots; used by tests and examples.
KernelSpec sum_kernel_spec(int length, RingParams ring);

}  // namespace hesynth
