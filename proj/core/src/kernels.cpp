#include "hesynth/kernels.hpp"

#include <algorithm>

namespace hesynth {

namespace {

int pick(int value, int fallback) { return value > 0 ? value : fallback; }

LayoutDesc vector_layout(int length) { return LayoutDesc::row_major({length}); }

// h x w grid whose outer ring is zero padding; the interior carries data.
LayoutDesc bordered_image_layout(int h, int w) {
  LayoutDesc l = LayoutDesc::row_major({h, w});
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (r == 0 || c == 0 || r == h - 1 || c == w - 1)
        l.packed[static_cast<size_t>(r * w + c)] = 0;
  return l;
}

PtConst broadcast_const(const std::string& name, uint32_t value, int n) {
  return PtConst{name, PtValue{std::vector<uint32_t>(static_cast<size_t>(n), value)}};
}

ExprPtr weighted(int64_t weight, ExprPtr read) {
  if (weight == 1) return read;
  return expr_mul(expr_const(weight), std::move(read));
}

KernelSpec reduction_kernel(const std::string& name, RingParams ring, int length,
                            InputDomain domain, bool squared_difference) {
  if (length < 1 || length > ring.n)
    throw StructuralError(name + ": length must fit the slot count");
  std::vector<SpecInput> inputs;
  if (squared_difference) {
    inputs = {{"x", vector_layout(length), domain}, {"y", vector_layout(length), domain}};
  } else {
    inputs = {{"a", vector_layout(length), domain}, {"b", vector_layout(length), domain}};
  }
  ExprPtr acc;
  for (int i = 0; i < length; ++i) {
    ExprPtr term;
    if (squared_difference) {
      ExprPtr d = expr_sub(expr_read(0, {i}), expr_read(1, {i}));
      term = expr_mul(d, d);
    } else {
      term = expr_mul(expr_read(0, {i}), expr_read(1, {i}));
    }
    acc = acc ? expr_add(acc, term) : term;
  }
  return lift_reference(name, ring, std::move(inputs), {}, LayoutDesc::row_major({1}),
                        {{0, acc}});
}

KernelSpec image_filter_kernel(const std::string& name, RingParams ring, int h, int w,
                               const int64_t weights[3][3]) {
  if (h < 3 || w < 3) throw StructuralError(name + ": image must be at least 3x3");
  if (h * w > ring.n) throw StructuralError(name + ": image exceeds slot capacity");
  LayoutDesc img = bordered_image_layout(h, w);
  std::vector<std::pair<int, ExprPtr>> reference;
  for (int r = 1; r < h - 1; ++r) {
    for (int c = 1; c < w - 1; ++c) {
      ExprPtr acc;
      for (int kh = -1; kh <= 1; ++kh) {
        for (int kw = -1; kw <= 1; ++kw) {
          int64_t weight = weights[kh + 1][kw + 1];
          if (weight == 0) continue;
          ExprPtr term = weighted(std::abs(weight), expr_read(0, {r + kh, c + kw}));
          if (!acc)
            acc = weight > 0 ? term : expr_sub(expr_const(0), term);
          else
            acc = weight > 0 ? expr_add(acc, term) : expr_sub(acc, term);
        }
      }
      reference.emplace_back(img.slot_of(std::vector<int>{r, c}), acc);
    }
  }
  return lift_reference(name, ring, {{"img", img, InputDomain::full}}, {}, img,
                        std::move(reference));
}

KernelSpec box_blur_kernel(RingParams ring, int h, int w) {
  if (h < 2 || w < 2) throw StructuralError("box_blur: image must be at least 2x2");
  if (h * w > ring.n) throw StructuralError("box_blur: image exceeds slot capacity");
  LayoutDesc img = LayoutDesc::row_major({h, w});
  std::vector<std::pair<int, ExprPtr>> reference;
  for (int r = 0; r + 1 < h; ++r) {
    for (int c = 0; c + 1 < w; ++c) {
      ExprPtr acc;
      for (int kh = 0; kh <= 1; ++kh)
        for (int kw = 0; kw <= 1; ++kw) {
          ExprPtr term = expr_read(0, {r + kh, c + kw});
          acc = acc ? expr_add(acc, term) : term;
        }
      reference.emplace_back(img.slot_of(std::vector<int>{r, c}), acc);
    }
  }
  return lift_reference("box_blur", ring, {{"img", img, InputDomain::full}}, {}, img,
                        std::move(reference));
}

KernelSpec roberts_cross_kernel(RingParams ring, int h, int w) {
  if (h < 3 || w < 3) throw StructuralError("roberts_cross: image must be at least 3x3");
  if (h * w > ring.n) throw StructuralError("roberts_cross: image exceeds slot capacity");
  LayoutDesc img = bordered_image_layout(h, w);
  std::vector<std::pair<int, ExprPtr>> reference;
  for (int r = 1; r < h - 1; ++r) {
    for (int c = 1; c < w - 1; ++c) {
      ExprPtr d1 = expr_sub(expr_read(0, {r, c}), expr_read(0, {r + 1, c + 1}));
      ExprPtr d2 = expr_sub(expr_read(0, {r, c + 1}), expr_read(0, {r + 1, c}));
      ExprPtr acc = expr_add(expr_mul(d1, d1), expr_mul(d2, d2));
      reference.emplace_back(img.slot_of(std::vector<int>{r, c}), acc);
    }
  }
  return lift_reference("roberts_cross", ring, {{"img", img, InputDomain::full}}, {}, img,
                        std::move(reference));
}

KernelSpec regression_kernel(const std::string& name, RingParams ring, int length,
                             bool quadratic, bool ct_coeffs) {
  if (length < 1 || length > ring.n)
    throw StructuralError(name + ": length must fit the slot count");
  LayoutDesc vec = vector_layout(length);
  std::vector<SpecInput> inputs{{"x", vec, InputDomain::full}};
  std::vector<PtConst> consts;
  const uint32_t a_val = 3, b_val = 5, c_val = 7;
  if (ct_coeffs) {
    inputs.push_back({"a", vec, InputDomain::full});
    inputs.push_back({"b", vec, InputDomain::full});
    if (quadratic) inputs.push_back({"c", vec, InputDomain::full});
  } else {
    consts.push_back(broadcast_const("a", a_val, ring.n));
    consts.push_back(broadcast_const("b", b_val, ring.n));
    if (quadratic) consts.push_back(broadcast_const("c", c_val, ring.n));
  }
  std::vector<std::pair<int, ExprPtr>> reference;
  for (int i = 0; i < length; ++i) {
    ExprPtr x = expr_read(0, {i});
    ExprPtr a_term = ct_coeffs ? expr_read(1, {i}) : expr_const(a_val);
    ExprPtr b_term = ct_coeffs ? expr_read(2, {i}) : expr_const(b_val);
    ExprPtr out;
    if (quadratic) {
      ExprPtr c_term = ct_coeffs ? expr_read(3, {i}) : expr_const(c_val);
      out = expr_add(expr_add(expr_mul(a_term, expr_mul(x, x)), expr_mul(b_term, x)), c_term);
    } else {
      out = expr_add(expr_mul(a_term, x), b_term);
    }
    reference.emplace_back(i, out);
  }
  return lift_reference(name, ring, std::move(inputs), std::move(consts), vec,
                        std::move(reference));
}

}  // namespace

const std::vector<std::string>& benchmark_kernel_names() {
  static const std::vector<std::string> names{
      "box_blur",   "dot_product",       "hamming",
      "l2_distance", "linear_regression", "polynomial_regression",
      "gx",         "gy",                "roberts_cross"};
  return names;
}

KernelConfig kernel_defaults(const std::string& name) {
  KernelConfig c;
  c.kernel = name;
  c.t = 65537;
  if (name == "box_blur") {
    c.n = 16;
    c.image_h = 2;
    c.image_w = 8;
  } else if (name == "dot_product") {
    c.n = 16;
    c.length = 8;
  } else if (name == "hamming" || name == "l2_distance") {
    c.n = 8;
    c.length = 4;
  } else if (name == "linear_regression" || name == "polynomial_regression") {
    c.n = 8;
    c.length = 8;
  } else if (name == "gx" || name == "gy" || name == "roberts_cross") {
    c.n = 32;
    c.image_h = 5;
    c.image_w = 5;
  } else {
    throw StructuralError("unknown kernel: " + name);
  }
  return c;
}

KernelSpec build_kernel(const KernelConfig& config) {
  KernelConfig defaults = kernel_defaults(config.kernel);
  RingParams ring{pick(config.n, defaults.n), config.t};
  ring.validate();
  const int length = pick(config.length, defaults.length);
  const int h = pick(config.image_h, defaults.image_h);
  const int w = pick(config.image_w, defaults.image_w);

  static const int64_t gx_weights[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static const int64_t gy_weights[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};

  const std::string& k = config.kernel;
  if (k == "box_blur") return box_blur_kernel(ring, h, w);
  if (k == "dot_product")
    return reduction_kernel("dot_product", ring, length, InputDomain::full, false);
  if (k == "hamming") return reduction_kernel("hamming", ring, length, InputDomain::binary, true);
  if (k == "l2_distance")
    return reduction_kernel("l2_distance", ring, length, InputDomain::full, true);
  if (k == "linear_regression")
    return regression_kernel("linear_regression", ring, length, false, config.ct_coeffs);
  if (k == "polynomial_regression")
    return regression_kernel("polynomial_regression", ring, length, true, config.ct_coeffs);
  if (k == "gx") return image_filter_kernel("gx", ring, h, w, gx_weights);
  if (k == "gy") return image_filter_kernel("gy", ring, h, w, gy_weights);
  if (k == "roberts_cross") return roberts_cross_kernel(ring, h, w);
  throw StructuralError("unknown kernel: " + k);
}

KernelSpec sum_kernel_spec(int length, RingParams ring) {
  if (length < 1 || length > ring.n)
    throw StructuralError("sum: length must fit the slot count");
  ExprPtr acc;
  for (int i = 0; i < length; ++i) {
    ExprPtr term = expr_read(0, {i});
    acc = acc ? expr_add(acc, term) : term;
  }
  return lift_reference("sum", ring, {{"v", vector_layout(length), InputDomain::full}}, {},
                        LayoutDesc::row_major({1}), {{0, acc}});
}

}  // namespace hesynth
