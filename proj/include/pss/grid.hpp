#pragma once

#include <vector>

#include "pss/common.hpp"

namespace pss {

// Periodic 1-D spatial grid: x_i = i * dx, i = 0..n-1, u(x + length) = u(x).
struct Grid1D {
  int n = 0;
  double length = 0.0;

  double dx() const { return length / n; }
  double xval(int i) const { return i * dx(); }

  void check() const {
    if (n < 16) throw GridTooSmall("grid needs at least 16 points");
    if (!(length > 0.0)) throw Error("grid length must be positive");
  }
};

// Time series of a gridded solution; values[k] is the snapshot at times[k].
struct SolutionField {
  Grid1D grid;
  std::vector<double> times;
  std::vector<std::vector<double>> values;

  int snapshots() const { return static_cast<int>(times.size()); }

  void check_finite() const {
    for (const auto& row : values)
      for (double v : row)
        if (!is_finite(v)) throw BlowupDetected("solution field has non-finite entries");
  }
};

// Dense 2-D field over a rectangular (x, t) window, row-major in x.
template <class T>
class Field2D {
 public:
  Field2D() = default;
  Field2D(int nx, int nt, T init = T{})
      : nx_(nx), nt_(nt), data_(static_cast<std::size_t>(nx) * nt, init) {}

  int nx() const { return nx_; }
  int nt() const { return nt_; }

  T& at(int i, int j) { return data_[idx(i, j)]; }
  const T& at(int i, int j) const { return data_[idx(i, j)]; }

  double x0 = 0.0, t0 = 0.0, dx = 0.0, dt = 0.0;
  double xval(int i) const { return x0 + i * dx; }
  double tval(int j) const { return t0 + j * dt; }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * nx_ + i;
  }
  int nx_ = 0, nt_ = 0;
  std::vector<T> data_;
};

using Mask2D = Field2D<unsigned char>;  // 1 = masked (excluded)

}  // namespace pss
