#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qcfield {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

/// Axis-aligned box in R^d. Used for sampling regions and tiling windows.
struct Box {
  RVec lo;
  RVec hi;

  Box() = default;
  Box(RVec lo_, RVec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size())
      throw std::invalid_argument("Box: lo and hi have different dimensions");
  }

  /// Symmetric box [-half, half]^d.
  static Box centered(int dim, double half) {
    return Box(RVec::Constant(dim, -half), RVec::Constant(dim, half));
  }

  int dim() const { return static_cast<int>(lo.size()); }

  double measure() const {
    double m = 1.0;
    for (int i = 0; i < dim(); ++i) m *= hi[i] - lo[i];
    return m;
  }

  bool degenerate() const {
    if (dim() == 0) return true;
    for (int i = 0; i < dim(); ++i)
      if (!(hi[i] > lo[i])) return true;
    return false;
  }

  bool contains(const RVec& x, double slack = 0.0) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    return true;
  }
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

/// A configurable size cap (node count, memory) was exceeded.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be read or written; the message names the path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qcfield
