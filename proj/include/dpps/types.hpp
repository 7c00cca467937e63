#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpps {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Tensor extents, outermost first: [d] for 1D signals, [H,W] for grayscale
// images, [H,W,3] for interleaved RGB. Data is always stored flat, row-major.
using Shape = std::vector<Index>;

inline Index shape_size(const Shape& s) {
  Index n = 1;
  for (Index e : s) n *= e;
  return s.empty() ? 0 : n;
}

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

// Base error; subclasses pick the CLI exit code (config = 1, runtime = 2).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct CapabilityError : Error {
  using Error::Error;
};
// Raised when sampling produces a non-finite state; carries the timestep.
struct NanAbort : Error {
  int t;
  explicit NanAbort(int t_, const std::string& what) : Error(what), t(t_) {}
};

struct SignalField {
  Shape shape;
  Vec data;  // length = product(shape)

  SignalField() = default;
  SignalField(Shape s, Vec d) : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != shape_size(shape))
      throw Error("SignalField: data length " + std::to_string(data.size()) +
                  " does not match shape " + shape_str(shape));
  }

  static SignalField zeros(Shape s) {
    Index n = shape_size(s);
    return SignalField(std::move(s), Vec::Zero(n));
  }

  Index size() const { return data.size(); }
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}
inline void require_config(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}
inline void require_io(bool cond, const std::string& msg) {
  if (!cond) throw IoError(msg);
}

}  // namespace dpps
