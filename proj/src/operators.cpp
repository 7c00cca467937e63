#include "dpps/operators.hpp"

#include <cmath>

namespace dpps {

namespace {

// Edge-inclusive symmetric reflection: -1 -> 0, -2 -> 1, n -> n-1.
// Valid for offsets up to the axis length, which the kernel checks enforce.
inline Index reflect(Index i, Index n) {
  if (i < 0) return -i - 1;
  if (i >= n) return 2 * n - 1 - i;
  return i;
}

inline Index pixel_count(const Shape& s, Index& channels) {
  channels = s.size() == 3 ? s[2] : 1;
  Index p = 1;
  for (std::size_t k = 0; k + (s.size() == 3 ? 1 : 0) < s.size(); ++k) p *= s[k];
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// MaskOperator

Shape MaskOperator::measured_shape(const Shape& input, const std::vector<std::uint8_t>& m) {
  require(input.size() >= 1 && input.size() <= 3, "mask: input must be [d], [H,W], or [H,W,C]");
  Index channels = 1;
  const Index pixels = pixel_count(input, channels);
  require(static_cast<Index>(m.size()) == pixels,
          "mask: flag count " + std::to_string(m.size()) + " does not match pixel count " +
              std::to_string(pixels));
  Index kept = 0;
  for (std::uint8_t f : m) kept += f ? 1 : 0;
  require(kept >= 1, "mask: at least one pixel must be kept");
  return {kept * channels};
}

MaskOperator::MaskOperator(Shape input, std::vector<std::uint8_t> pixel_mask)
    : LinearOperator(input, measured_shape(input, pixel_mask)),
      pixel_mask_(std::move(pixel_mask)) {
  Index channels = 1;
  const Index pixels = pixel_count(in_, channels);
  channels_ = channels;
  kept_elems_.reserve(static_cast<std::size_t>(output_size()));
  for (Index p = 0; p < pixels; ++p)
    if (pixel_mask_[static_cast<std::size_t>(p)])
      for (Index c = 0; c < channels_; ++c) kept_elems_.push_back(p * channels_ + c);
}

MaskOperator MaskOperator::random(Shape input, double keep_probability, std::uint64_t seed) {
  require(keep_probability > 0.0 && keep_probability <= 1.0,
          "mask: keep_probability outside (0,1]");
  Index channels = 1;
  const Index pixels = pixel_count(input, channels);
  Rng rng(seed);
  std::vector<std::uint8_t> m(static_cast<std::size_t>(pixels));
  for (auto& f : m) f = rng.uniform() <= keep_probability ? 1 : 0;
  return MaskOperator(std::move(input), std::move(m));
}

void MaskOperator::do_apply(const Vec& x, Vec& out) const {
  for (std::size_t i = 0; i < kept_elems_.size(); ++i)
    out[static_cast<Index>(i)] = x[kept_elems_[i]];
}

void MaskOperator::do_apply_transpose(const Vec& u, Vec& out) const {
  out.setZero();
  for (std::size_t i = 0; i < kept_elems_.size(); ++i)
    out[kept_elems_[i]] = u[static_cast<Index>(i)];
}

// ---------------------------------------------------------------------------
// ConvolutionOperator

ConvolutionOperator::ConvolutionOperator(Shape input, Mat kernel, Boundary boundary)
    : LinearOperator(input, input), kernel_(std::move(kernel)), boundary_(boundary) {
  require(in_.size() == 2 || in_.size() == 3, "convolution: input must be [H,W] or [H,W,C]");
  h_ = in_[0];
  w_ = in_[1];
  channels_ = in_.size() == 3 ? in_[2] : 1;
  require(kernel_.rows() % 2 == 1 && kernel_.cols() % 2 == 1,
          "convolution: kernel sides must be odd");
  require(kernel_.rows() / 2 < h_ && kernel_.cols() / 2 < w_,
          "convolution: kernel larger than image");
  require(std::abs(kernel_.sum() - 1.0) <= 1e-12, "convolution: kernel must sum to 1");
}

void ConvolutionOperator::do_apply(const Vec& x, Vec& out) const {
  const Index kh = kernel_.rows(), kw = kernel_.cols();
  const Index cr = kh / 2, cc = kw / 2;
  for (Index r = 0; r < h_; ++r)
    for (Index c = 0; c < w_; ++c)
      for (Index ch = 0; ch < channels_; ++ch) {
        double acc = 0.0;
        for (Index i = 0; i < kh; ++i)
          for (Index j = 0; j < kw; ++j) {
            const Index ri = r + i - cr, cj = c + j - cc;
            if (boundary_ == Boundary::Zero && (ri < 0 || ri >= h_ || cj < 0 || cj >= w_))
              continue;
            const Index rr = reflect(ri, h_), cc2 = reflect(cj, w_);
            acc += kernel_(i, j) * x[(rr * w_ + cc2) * channels_ + ch];
          }
        out[(r * w_ + c) * channels_ + ch] = acc;
      }
}

void ConvolutionOperator::do_apply_transpose(const Vec& u, Vec& out) const {
  out.setZero();
  const Index kh = kernel_.rows(), kw = kernel_.cols();
  const Index cr = kh / 2, cc = kw / 2;
  // Scatter through the same index map as do_apply, so the pair realizes an
  // exact matrix transpose for either boundary mode.
  for (Index r = 0; r < h_; ++r)
    for (Index c = 0; c < w_; ++c)
      for (Index ch = 0; ch < channels_; ++ch) {
        const double uv = u[(r * w_ + c) * channels_ + ch];
        for (Index i = 0; i < kh; ++i)
          for (Index j = 0; j < kw; ++j) {
            const Index ri = r + i - cr, cj = c + j - cc;
            if (boundary_ == Boundary::Zero && (ri < 0 || ri >= h_ || cj < 0 || cj >= w_))
              continue;
            const Index rr = reflect(ri, h_), cc2 = reflect(cj, w_);
            out[(rr * w_ + cc2) * channels_ + ch] += kernel_(i, j) * uv;
          }
      }
}

Mat gaussian_kernel(int size, double sigma) {
  require(size >= 1 && size % 2 == 1, "gaussian_kernel: size must be odd and positive");
  require(sigma > 0.0, "gaussian_kernel: sigma must be positive");
  Mat k(size, size);
  const double c = (size - 1) / 2.0;
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      const double d2 = (i - c) * (i - c) + (j - c) * (j - c);
      k(i, j) = std::exp(-d2 / (2.0 * sigma * sigma));
    }
  k /= k.sum();
  return k;
}

Mat box_kernel(int size) {
  require(size >= 1 && size % 2 == 1, "box_kernel: size must be odd and positive");
  return Mat::Constant(size, size, 1.0 / (size * size));
}

Mat motion_kernel(int length) {
  require(length >= 1 && length % 2 == 1, "motion_kernel: length must be odd and positive");
  return Mat::Constant(1, length, 1.0 / length);
}

// ---------------------------------------------------------------------------
// DownsampleOperator

Shape DownsampleOperator::reduced_shape(const Shape& input, int factor) {
  require(factor >= 1, "downsample: factor must be >= 1");
  require(input.size() >= 1 && input.size() <= 3, "downsample: input must be [d], [H,W], or [H,W,C]");
  Shape out = input;
  const std::size_t spatial = input.size() == 3 ? 2 : input.size();
  for (std::size_t k = 0; k < spatial; ++k) {
    require(input[k] % factor == 0, "downsample: extent " + std::to_string(input[k]) +
                                        " not divisible by factor " + std::to_string(factor));
    out[k] = input[k] / factor;
  }
  return out;
}

DownsampleOperator::DownsampleOperator(Shape input, int factor)
    : LinearOperator(input, reduced_shape(input, factor)), factor_(factor) {
  channels_ = in_.size() == 3 ? in_[2] : 1;
}

void DownsampleOperator::do_apply(const Vec& x, Vec& out) const {
  const Index f = factor_;
  if (in_.size() == 1) {
    const Index m = out_[0];
    for (Index b = 0; b < m; ++b) {
      double acc = 0.0;
      for (Index i = 0; i < f; ++i) acc += x[b * f + i];
      out[b] = acc / static_cast<double>(f);
    }
    return;
  }
  const Index w = in_[1], oh = out_[0], ow = out_[1];
  const double inv = 1.0 / static_cast<double>(f * f);
  for (Index r = 0; r < oh; ++r)
    for (Index c = 0; c < ow; ++c)
      for (Index ch = 0; ch < channels_; ++ch) {
        double acc = 0.0;
        for (Index i = 0; i < f; ++i)
          for (Index j = 0; j < f; ++j)
            acc += x[((r * f + i) * w + (c * f + j)) * channels_ + ch];
        out[(r * ow + c) * channels_ + ch] = acc * inv;
      }
}

void DownsampleOperator::do_apply_transpose(const Vec& u, Vec& out) const {
  const Index f = factor_;
  if (in_.size() == 1) {
    const Index m = out_[0];
    const double inv = 1.0 / static_cast<double>(f);
    for (Index b = 0; b < m; ++b)
      for (Index i = 0; i < f; ++i) out[b * f + i] = u[b] * inv;
    return;
  }
  const Index w = in_[1], oh = out_[0], ow = out_[1];
  const double inv = 1.0 / static_cast<double>(f * f);
  for (Index r = 0; r < oh; ++r)
    for (Index c = 0; c < ow; ++c)
      for (Index ch = 0; ch < channels_; ++ch) {
        const double uv = u[(r * ow + c) * channels_ + ch] * inv;
        for (Index i = 0; i < f; ++i)
          for (Index j = 0; j < f; ++j)
            out[((r * f + i) * w + (c * f + j)) * channels_ + ch] = uv;
      }
}

// ---------------------------------------------------------------------------
// ComposedOperator

ComposedOperator::ComposedOperator(std::shared_ptr<const LinearOperator> outer,
                                   std::shared_ptr<const LinearOperator> inner)
    : LinearOperator(inner->input_shape(), outer->output_shape()),
      outer_(std::move(outer)),
      inner_(std::move(inner)) {
  require(inner_->output_size() == outer_->input_size(),
          "compose: inner output shape " + shape_str(inner_->output_shape()) +
              " does not match outer input shape " + shape_str(outer_->input_shape()));
}

void ComposedOperator::do_apply(const Vec& x, Vec& out) const {
  out = outer_->apply(inner_->apply(x));
}

void ComposedOperator::do_apply_transpose(const Vec& u, Vec& out) const {
  out = inner_->apply_transpose(outer_->apply_transpose(u));
}

// ---------------------------------------------------------------------------

Vec measure(const LinearOperator& A, const Vec& x0, double sigma_y, Rng& rng) {
  require(sigma_y >= 0.0, "measure: sigma_y must be non-negative");
  Vec y = A.apply(x0);
  if (sigma_y > 0.0) y += sigma_y * rng.normal_vec(y.size());
  return y;
}

Mat dense_matrix(const LinearOperator& A, Index max_entries) {
  const Index n = A.input_size(), m = A.output_size();
  require(m * n <= max_entries, "dense_matrix: " + std::to_string(m * n) +
                                    " entries exceed cap " + std::to_string(max_entries));
  Mat M(m, n);
  Vec e = Vec::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    M.col(j) = A.apply(e);
    e[j] = 0.0;
  }
  return M;
}

}  // namespace dpps
