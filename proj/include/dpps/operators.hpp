#pragma once

#include "dpps/rng.hpp"
#include "dpps/types.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace dpps {

// Measurement operators y = A x for linear inverse problems. apply and
// apply_transpose realize the same matrix: <A x, u> == <x, A^T u> holds to
// rounding for every implementation (checked by the adjoint property tests
// against dense basis probing).
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  const Shape& input_shape() const { return in_; }
  const Shape& output_shape() const { return out_; }
  Index input_size() const { return shape_size(in_); }
  Index output_size() const { return shape_size(out_); }

  Vec apply(const Vec& x) const {
    require(x.size() == input_size(), "apply: input length " + std::to_string(x.size()) +
                                          " does not match shape " + shape_str(in_));
    Vec out(output_size());
    do_apply(x, out);
    return out;
  }

  Vec apply_transpose(const Vec& u) const {
    require(u.size() == output_size(),
            "apply_transpose: input length " + std::to_string(u.size()) +
                " does not match shape " + shape_str(out_));
    Vec out(input_size());
    do_apply_transpose(u, out);
    return out;
  }

 protected:
  LinearOperator(Shape in, Shape out) : in_(std::move(in)), out_(std::move(out)) {}

  virtual void do_apply(const Vec& x, Vec& out) const = 0;
  virtual void do_apply_transpose(const Vec& u, Vec& out) const = 0;

  Shape in_, out_;
};

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(Shape s) : LinearOperator(s, s) {}

 private:
  void do_apply(const Vec& x, Vec& out) const override { out = x; }
  void do_apply_transpose(const Vec& u, Vec& out) const override { out = u; }
};

// Inpainting mask. The mask is one flag per pixel, applied across all
// channels jointly; apply compacts kept entries in row-major order, so the
// measurement space has no placeholder zeros and A A^T = I.
class MaskOperator final : public LinearOperator {
 public:
  MaskOperator(Shape input, std::vector<std::uint8_t> pixel_mask);

  // One Bernoulli(keep_probability) draw per pixel. Throws if the draw keeps
  // nothing (possible only for tiny fields; callers use frozen seeds).
  static MaskOperator random(Shape input, double keep_probability, std::uint64_t seed);

  const std::vector<std::uint8_t>& pixel_mask() const { return pixel_mask_; }
  Index kept_pixels() const { return static_cast<Index>(kept_elems_.size() / channels_); }

 private:
  void do_apply(const Vec& x, Vec& out) const override;
  void do_apply_transpose(const Vec& u, Vec& out) const override;
  static Shape measured_shape(const Shape& input, const std::vector<std::uint8_t>& m);

  std::vector<std::uint8_t> pixel_mask_;  // length = pixel count
  std::vector<Index> kept_elems_;         // flat element indices, ascending
  Index channels_ = 1;
};

enum class Boundary { Reflect, Zero };

// 2D convolution with an odd-sided kernel normalized to sum 1. Works on
// [H,W] and per channel on [H,W,C]. Reflect uses edge-inclusive symmetric
// padding. The adjoint scatters through the same index map, so it is the
// exact transpose of the realized matrix including boundary handling.
class ConvolutionOperator final : public LinearOperator {
 public:
  ConvolutionOperator(Shape input, Mat kernel, Boundary boundary = Boundary::Reflect);

  const Mat& kernel() const { return kernel_; }

 private:
  void do_apply(const Vec& x, Vec& out) const override;
  void do_apply_transpose(const Vec& u, Vec& out) const override;

  Mat kernel_;
  Boundary boundary_;
  Index h_ = 0, w_ = 0, channels_ = 1;
};

Mat gaussian_kernel(int size, double sigma);
Mat box_kernel(int size);
// Horizontal-motion kernel: a normalized 1 x length row.
Mat motion_kernel(int length);

// Block averaging by an integer factor; spatial dims must divide evenly.
// Works on [d], [H,W], [H,W,C]. The adjoint replicates each measurement over
// its block scaled by 1/factor^k (k = number of spatial dims).
class DownsampleOperator final : public LinearOperator {
 public:
  DownsampleOperator(Shape input, int factor);

  int factor() const { return factor_; }

 private:
  void do_apply(const Vec& x, Vec& out) const override;
  void do_apply_transpose(const Vec& u, Vec& out) const override;
  static Shape reduced_shape(const Shape& input, int factor);

  int factor_;
  Index channels_ = 1;
};

// outer(inner(x)); transpose composes in reverse.
class ComposedOperator final : public LinearOperator {
 public:
  ComposedOperator(std::shared_ptr<const LinearOperator> outer,
                   std::shared_ptr<const LinearOperator> inner);

 private:
  void do_apply(const Vec& x, Vec& out) const override;
  void do_apply_transpose(const Vec& u, Vec& out) const override;

  std::shared_ptr<const LinearOperator> outer_, inner_;
};

// y = A x0 + sigma_y * eps, eps ~ N(0, I) in measurement space.
Vec measure(const LinearOperator& A, const Vec& x0, double sigma_y, Rng& rng);

// Materializes A by probing basis vectors. Guarded by an entry cap since this
// is for oracles and small problems only.
Mat dense_matrix(const LinearOperator& A, Index max_entries = 1000000);

}  // namespace dpps
