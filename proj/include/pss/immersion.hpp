#pragma once

#include <string>

#include "pss/grid.hpp"
#include "pss/secondform.hpp"

namespace pss {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

struct FrameState {
  Vec3 X, e1{1, 0, 0}, e2{0, 1, 0}, e3{0, 0, 1};

  double orthonormality_error() const;
  void renormalize();  // Gram-Schmidt on (e1, e2, e3)
};

struct Mesh {
  Field2D<FrameState> states;
  Mask2D mask;              // 1 = vertex not part of the immersed surface
  Field2D<double> closure;  // per-plaquette two-path position defect
  double max_closure = 0.0;

  bool valid(int i, int j) const { return mask.at(i, j) == 0; }
};

struct IntegrateOptions {
  int renorm_every = 16;
  double drift_guard = 1e-4;
};

// Integrates the moving frame over the grid: one t-line through the anchor
// column, then x-lines from each of its points. Heun steps; Gram-Schmidt
// renormalization every renorm_every steps with a drift guard.
Mesh integrate_frame(const Field2D<FrameCoeffs>& frames,
                     const Field2D<SecondFundamentalForm>& sff,
                     const Mask2D* mask = nullptr,
                     const FrameState& anchor = FrameState{},
                     const IntegrateOptions& opts = {});

struct LinearProblemResult {
  Field2D<double> v1, v2;        // transported components along the lattice path
  Field2D<double> holonomy;      // per-plaquette transport defect ||M_loop - I||_F
  double max_holonomy = 0.0;
};

LinearProblemResult linear_problem_integrate(const Field2D<FrameCoeffs>& frames,
                                             const Mask2D* mask = nullptr,
                                             double v1_0 = 1.0, double v2_0 = 0.0);

struct MetricPoint {
  double E = 0.0, F = 0.0, G = 0.0;
  bool valid = false;
};

Field2D<MetricPoint> induced_metric(const Mesh& mesh);

// Theoretical first fundamental form carried by the frame coefficients.
MetricPoint metric_theory(const FrameCoeffs& f);

// Brioschi formula with central differences; NaN where undefined.
Field2D<double> gaussian_curvature(const Field2D<MetricPoint>& metric,
                                   double eps_det = 1e-12);

struct RecoveredSff {
  double a = 0.0, b = 0.0, c = 0.0;
  bool valid = false;
};

// Second-difference estimate of the second fundamental form, converted into
// the coframe carried by the frame coefficients.
Field2D<RecoveredSff> second_form_recover(const Mesh& mesh,
                                          const Field2D<FrameCoeffs>& frames,
                                          double eps_det = 1e-12);

// Text OBJ: v/vn per vertex (6 significant digits), quad faces over unmasked
// cells, 1-based indices. Returns the number of faces written.
int export_obj(const Mesh& mesh, const std::string& path);

}  // namespace pss
