#include "pss/immersion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

namespace pss {

double FrameState::orthonormality_error() const {
  const Vec3* e[3] = {&e1, &e2, &e3};
  double err = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const double want = i == j ? 1.0 : 0.0;
      err = std::max(err, std::abs(dot(*e[i], *e[j]) - want));
    }
  return err;
}

void FrameState::renormalize() {
  e1 = e1 * (1.0 / norm(e1));
  e2 = e2 - e1 * dot(e1, e2);
  e2 = e2 * (1.0 / norm(e2));
  e3 = cross(e1, e2);
}

namespace {

// Derivative of the frame state along x (dir=0) or t (dir=1) at given
// coefficients: the right-hand side of the moving-frame system.
FrameState frame_rhs(const FrameState& y, const FrameCoeffs& f,
                     const SecondFundamentalForm& s, int dir) {
  const double w1 = f.f[0][dir];       // omega_1 coefficient
  const double w2 = f.f[1][dir];       // omega_2
  const double w3 = f.f[2][dir];       // omega_3 = connection
  const double w13 = s.a * w1 + s.b * w2;
  const double w23 = s.b * w1 + s.c * w2;
  FrameState d;
  d.X = y.e1 * w1 + y.e2 * w2;
  d.e1 = y.e2 * w3 + y.e3 * w13;
  d.e2 = y.e1 * (-w3) + y.e3 * w23;
  d.e3 = y.e1 * (-w13) + y.e2 * (-w23);
  return d;
}

FrameState axpy(const FrameState& y, const FrameState& d, double h) {
  FrameState out = y;
  out.X += d.X * h;
  out.e1 += d.e1 * h;
  out.e2 += d.e2 * h;
  out.e3 += d.e3 * h;
  return out;
}

// Heun step using endpoint coefficient values.
FrameState heun(const FrameState& y, const FrameCoeffs& f0,
                const SecondFundamentalForm& s0, const FrameCoeffs& f1,
                const SecondFundamentalForm& s1, int dir, double h) {
  const FrameState k1 = frame_rhs(y, f0, s0, dir);
  const FrameState mid = axpy(y, k1, h);
  const FrameState k2 = frame_rhs(mid, f1, s1, dir);
  FrameState out = y;
  out.X += (k1.X + k2.X) * (0.5 * h);
  out.e1 += (k1.e1 + k2.e1) * (0.5 * h);
  out.e2 += (k1.e2 + k2.e2) * (0.5 * h);
  out.e3 += (k1.e3 + k2.e3) * (0.5 * h);
  return out;
}

}  // namespace

Mesh integrate_frame(const Field2D<FrameCoeffs>& frames,
                     const Field2D<SecondFundamentalForm>& sff,
                     const Mask2D* mask, const FrameState& anchor,
                     const IntegrateOptions& opts) {
  const int nx = frames.nx(), nt = frames.nt();
  if (nx != sff.nx() || nt != sff.nt()) throw Error("field size mismatch");
  if (nx < 2 || nt < 2) throw GridTooSmall("frame integration needs a 2x2 grid");
  if (anchor.orthonormality_error() > 1e-8)
    throw Error("anchor frame is not orthonormal");

  auto in_mask = [&](int i, int j) { return mask != nullptr && mask->at(i, j) != 0; };

  Mesh mesh;
  mesh.states = Field2D<FrameState>(nx, nt);
  mesh.states.x0 = frames.x0;
  mesh.states.t0 = frames.t0;
  mesh.states.dx = frames.dx;
  mesh.states.dt = frames.dt;
  mesh.mask = Mask2D(nx, nt, 1);
  mesh.mask.x0 = frames.x0;
  mesh.mask.t0 = frames.t0;
  mesh.mask.dx = frames.dx;
  mesh.mask.dt = frames.dt;

  // Anchor: lower-left unmasked vertex.
  int ai = -1, aj = -1;
  for (int j = 0; j < nt && ai < 0; ++j)
    for (int i = 0; i < nx; ++i)
      if (!in_mask(i, j)) {
        ai = i;
        aj = j;
        break;
      }
  if (ai < 0) throw MaskedRegion("every grid vertex is masked");

  auto advance = [&](int i0, int j0, int i1, int j1, int dir, double h,
                     int steps_done) -> bool {
    if (in_mask(i1, j1)) return false;
    FrameState y = mesh.states.at(i0, j0);
    FrameState next = heun(y, frames.at(i0, j0), sff.at(i0, j0),
                           frames.at(i1, j1), sff.at(i1, j1), dir, h);
    if ((steps_done + 1) % opts.renorm_every == 0) {
      const double drift = next.orthonormality_error();
      if (drift > opts.drift_guard)
        throw FrameDrift("frame drift " + std::to_string(drift) +
                         " exceeded the guard before renormalization");
      next.renormalize();
    }
    mesh.states.at(i1, j1) = next;
    mesh.mask.at(i1, j1) = 0;
    return true;
  };

  mesh.states.at(ai, aj) = anchor;
  mesh.mask.at(ai, aj) = 0;

  // One t-line through the anchor...
  for (int j = aj + 1, steps = 0; j < nt; ++j, ++steps)
    if (!advance(ai, j - 1, ai, j, 1, frames.dt, steps)) break;
  for (int j = aj - 1, steps = 0; j >= 0; --j, ++steps)
    if (!advance(ai, j + 1, ai, j, 1, -frames.dt, steps)) break;

  // ...then x-lines from each of its points, line-parallel.
  std::vector<int> rows;
  for (int j = 0; j < nt; ++j)
    if (mesh.mask.at(ai, j) == 0) rows.push_back(j);
  parallel_for(rows.size(), [&](std::size_t rk) {
    const int j = rows[rk];
    for (int i = ai + 1, steps = 0; i < nx; ++i, ++steps)
      if (!advance(i - 1, j, i, j, 0, frames.dx, steps)) break;
    for (int i = ai - 1, steps = 0; i >= 0; --i, ++steps)
      if (!advance(i + 1, j, i, j, 0, -frames.dx, steps)) break;
  });

  // Per-plaquette two-path closure defect from the stored corner state.
  mesh.closure = Field2D<double>(nx, nt, 0.0);
  mesh.closure.x0 = frames.x0;
  mesh.closure.t0 = frames.t0;
  mesh.closure.dx = frames.dx;
  mesh.closure.dt = frames.dt;
  for (int j = 0; j + 1 < nt; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      if (mesh.mask.at(i, j) || mesh.mask.at(i + 1, j) || mesh.mask.at(i, j + 1) ||
          mesh.mask.at(i + 1, j + 1))
        continue;
      const FrameState& y = mesh.states.at(i, j);
      FrameState via_x = heun(y, frames.at(i, j), sff.at(i, j),
                              frames.at(i + 1, j), sff.at(i + 1, j), 0, frames.dx);
      via_x = heun(via_x, frames.at(i + 1, j), sff.at(i + 1, j),
                   frames.at(i + 1, j + 1), sff.at(i + 1, j + 1), 1, frames.dt);
      FrameState via_t = heun(y, frames.at(i, j), sff.at(i, j),
                              frames.at(i, j + 1), sff.at(i, j + 1), 1, frames.dt);
      via_t = heun(via_t, frames.at(i, j + 1), sff.at(i, j + 1),
                   frames.at(i + 1, j + 1), sff.at(i + 1, j + 1), 0, frames.dx);
      const double defect = norm(via_x.X - via_t.X);
      mesh.closure.at(i, j) = defect;
      mesh.max_closure = std::max(mesh.max_closure, defect);
    }
  return mesh;
}

namespace {

using Mat2 = std::array<double, 4>;  // row-major 2x2

Mat2 lp_matrix(const FrameCoeffs& f, int dir) {
  const double w1 = f.f[0][dir], w2 = f.f[1][dir], w3 = f.f[2][dir];
  return {0.5 * w2, 0.5 * (w1 - w3), 0.5 * (w1 + w3), -0.5 * w2};
}

Mat2 matmul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

// Heun transport matrix across one edge: M = I + h/2 (A0 + A1) + h^2/2 A1 A0.
Mat2 edge_transport(const Mat2& a0, const Mat2& a1, double h) {
  Mat2 m = matmul(a1, a0);
  Mat2 out;
  const Mat2 eye{1, 0, 0, 1};
  for (int k = 0; k < 4; ++k)
    out[static_cast<std::size_t>(k)] =
        eye[static_cast<std::size_t>(k)] +
        0.5 * h * (a0[static_cast<std::size_t>(k)] + a1[static_cast<std::size_t>(k)]) +
        0.5 * h * h * m[static_cast<std::size_t>(k)];
  return out;
}

}  // namespace

LinearProblemResult linear_problem_integrate(const Field2D<FrameCoeffs>& frames,
                                             const Mask2D* mask, double v1_0,
                                             double v2_0) {
  const int nx = frames.nx(), nt = frames.nt();
  if (nx < 2 || nt < 2) throw GridTooSmall("linear problem needs a 2x2 grid");
  auto in_mask = [&](int i, int j) { return mask != nullptr && mask->at(i, j) != 0; };

  LinearProblemResult out;
  out.v1 = Field2D<double>(nx, nt, std::numeric_limits<double>::quiet_NaN());
  out.v2 = Field2D<double>(nx, nt, std::numeric_limits<double>::quiet_NaN());
  out.holonomy = Field2D<double>(nx, nt, 0.0);
  for (auto* f : {&out.v1, &out.v2, &out.holonomy}) {
    f->x0 = frames.x0;
    f->t0 = frames.t0;
    f->dx = frames.dx;
    f->dt = frames.dt;
  }

  int ai = -1, aj = -1;
  for (int j = 0; j < nt && ai < 0; ++j)
    for (int i = 0; i < nx; ++i)
      if (!in_mask(i, j)) {
        ai = i;
        aj = j;
        break;
      }
  if (ai < 0) throw MaskedRegion("every grid vertex is masked");

  auto set = [&](int i, int j, double a, double b) {
    out.v1.at(i, j) = a;
    out.v2.at(i, j) = b;
  };
  auto step_to = [&](int i0, int j0, int i1, int j1, int dir, double h) -> bool {
    if (in_mask(i1, j1)) return false;
    const Mat2 m = edge_transport(lp_matrix(frames.at(i0, j0), dir),
                                  lp_matrix(frames.at(i1, j1), dir), h);
    const double a = out.v1.at(i0, j0), b = out.v2.at(i0, j0);
    set(i1, j1, m[0] * a + m[1] * b, m[2] * a + m[3] * b);
    return true;
  };

  set(ai, aj, v1_0, v2_0);
  for (int j = aj + 1; j < nt; ++j)
    if (!step_to(ai, j - 1, ai, j, 1, frames.dt)) break;
  for (int j = aj - 1; j >= 0; --j)
    if (!step_to(ai, j + 1, ai, j, 1, -frames.dt)) break;
  for (int j = 0; j < nt; ++j) {
    if (std::isnan(out.v1.at(ai, j))) continue;
    for (int i = ai + 1; i < nx; ++i)
      if (!step_to(i - 1, j, i, j, 0, frames.dx)) break;
    for (int i = ai - 1; i >= 0; --i)
      if (!step_to(i + 1, j, i, j, 0, -frames.dx)) break;
  }

  // Plaquette holonomy: transport around each cell, compare with identity.
  for (int j = 0; j + 1 < nt; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      if (in_mask(i, j) || in_mask(i + 1, j) || in_mask(i, j + 1) ||
          in_mask(i + 1, j + 1))
        continue;
      const Mat2 bottom = edge_transport(lp_matrix(frames.at(i, j), 0),
                                         lp_matrix(frames.at(i + 1, j), 0), frames.dx);
      const Mat2 right = edge_transport(lp_matrix(frames.at(i + 1, j), 1),
                                        lp_matrix(frames.at(i + 1, j + 1), 1), frames.dt);
      const Mat2 top = edge_transport(lp_matrix(frames.at(i + 1, j + 1), 0),
                                      lp_matrix(frames.at(i, j + 1), 0), -frames.dx);
      const Mat2 left = edge_transport(lp_matrix(frames.at(i, j + 1), 1),
                                       lp_matrix(frames.at(i, j), 1), -frames.dt);
      const Mat2 loop = matmul(left, matmul(top, matmul(right, bottom)));
      double defect = 0.0;
      const Mat2 eye{1, 0, 0, 1};
      for (int k = 0; k < 4; ++k) {
        const double d = loop[static_cast<std::size_t>(k)] - eye[static_cast<std::size_t>(k)];
        defect += d * d;
      }
      defect = std::sqrt(defect);
      out.holonomy.at(i, j) = defect;
      out.max_holonomy = std::max(out.max_holonomy, defect);
    }
  return out;
}

Field2D<MetricPoint> induced_metric(const Mesh& mesh) {
  const int nx = mesh.states.nx(), nt = mesh.states.nt();
  Field2D<MetricPoint> out(nx, nt);
  out.x0 = mesh.states.x0;
  out.t0 = mesh.states.t0;
  out.dx = mesh.states.dx;
  out.dt = mesh.states.dt;
  for (int j = 1; j + 1 < nt; ++j)
    for (int i = 1; i + 1 < nx; ++i) {
      if (!mesh.valid(i, j) || !mesh.valid(i - 1, j) || !mesh.valid(i + 1, j) ||
          !mesh.valid(i, j - 1) || !mesh.valid(i, j + 1))
        continue;
      const Vec3 Xx = (mesh.states.at(i + 1, j).X - mesh.states.at(i - 1, j).X) *
                      (1.0 / (2.0 * mesh.states.dx));
      const Vec3 Xt = (mesh.states.at(i, j + 1).X - mesh.states.at(i, j - 1).X) *
                      (1.0 / (2.0 * mesh.states.dt));
      MetricPoint& m = out.at(i, j);
      m.E = dot(Xx, Xx);
      m.F = dot(Xx, Xt);
      m.G = dot(Xt, Xt);
      m.valid = true;
    }
  return out;
}

MetricPoint metric_theory(const FrameCoeffs& f) {
  MetricPoint m;
  m.E = f.f[0][0] * f.f[0][0] + f.f[1][0] * f.f[1][0];
  m.F = f.f[0][0] * f.f[0][1] + f.f[1][0] * f.f[1][1];
  m.G = f.f[0][1] * f.f[0][1] + f.f[1][1] * f.f[1][1];
  m.valid = true;
  return m;
}

Field2D<double> gaussian_curvature(const Field2D<MetricPoint>& metric,
                                   double eps_det) {
  const int nx = metric.nx(), nt = metric.nt();
  Field2D<double> K(nx, nt, std::numeric_limits<double>::quiet_NaN());
  K.x0 = metric.x0;
  K.t0 = metric.t0;
  K.dx = metric.dx;
  K.dt = metric.dt;
  const double du = metric.dx, dv = metric.dt;

  auto ok = [&](int i, int j) { return metric.at(i, j).valid; };

  for (int j = 1; j + 1 < nt; ++j)
    for (int i = 1; i + 1 < nx; ++i) {
      bool all_valid = true;
      for (int dj = -1; dj <= 1 && all_valid; ++dj)
        for (int di = -1; di <= 1; ++di)
          if (!ok(i + di, j + dj)) {
            all_valid = false;
            break;
          }
      if (!all_valid) continue;
      const MetricPoint& c = metric.at(i, j);
      auto E = [&](int a, int b) { return metric.at(a, b).E; };
      auto F = [&](int a, int b) { return metric.at(a, b).F; };
      auto G = [&](int a, int b) { return metric.at(a, b).G; };
      const double Eu = (E(i + 1, j) - E(i - 1, j)) / (2 * du);
      const double Ev = (E(i, j + 1) - E(i, j - 1)) / (2 * dv);
      const double Gu = (G(i + 1, j) - G(i - 1, j)) / (2 * du);
      const double Gv = (G(i, j + 1) - G(i, j - 1)) / (2 * dv);
      const double Fu = (F(i + 1, j) - F(i - 1, j)) / (2 * du);
      const double Fv = (F(i, j + 1) - F(i, j - 1)) / (2 * dv);
      const double Evv = (E(i, j + 1) - 2 * E(i, j) + E(i, j - 1)) / (dv * dv);
      const double Guu = (G(i + 1, j) - 2 * G(i, j) + G(i - 1, j)) / (du * du);
      const double Fuv = (F(i + 1, j + 1) - F(i + 1, j - 1) - F(i - 1, j + 1) +
                          F(i - 1, j - 1)) / (4 * du * dv);
      const double det = c.E * c.G - c.F * c.F;
      if (det < eps_det) throw DegenerateMetric("EG - F^2 not positive");
      const double m11 = -0.5 * Evv + Fuv - 0.5 * Guu;
      const double a1[9] = {m11,          0.5 * Eu, Fu - 0.5 * Ev,
                            Fv - 0.5 * Gu, c.E,      c.F,
                            0.5 * Gv,      c.F,      c.G};
      const double a2[9] = {0.0,      0.5 * Ev, 0.5 * Gu,
                            0.5 * Ev, c.E,      c.F,
                            0.5 * Gu, c.F,      c.G};
      auto det3 = [](const double* m) {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) -
               m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
      };
      K.at(i, j) = (det3(a1) - det3(a2)) / (det * det);
    }
  return K;
}

Field2D<RecoveredSff> second_form_recover(const Mesh& mesh,
                                          const Field2D<FrameCoeffs>& frames,
                                          double eps_det) {
  const int nx = mesh.states.nx(), nt = mesh.states.nt();
  Field2D<RecoveredSff> out(nx, nt);
  out.x0 = mesh.states.x0;
  out.t0 = mesh.states.t0;
  out.dx = mesh.states.dx;
  out.dt = mesh.states.dt;
  const double dx = mesh.states.dx, dt = mesh.states.dt;

  for (int j = 1; j + 1 < nt; ++j)
    for (int i = 1; i + 1 < nx; ++i) {
      bool good = true;
      for (int dj = -1; dj <= 1 && good; ++dj)
        for (int di = -1; di <= 1; ++di)
          if (!mesh.valid(i + di, j + dj)) {
            good = false;
            break;
          }
      if (!good) continue;
      auto X = [&](int a, int b) { return mesh.states.at(a, b).X; };
      const Vec3 Xxx = (X(i + 1, j) - X(i, j) * 2.0 + X(i - 1, j)) * (1.0 / (dx * dx));
      const Vec3 Xtt = (X(i, j + 1) - X(i, j) * 2.0 + X(i, j - 1)) * (1.0 / (dt * dt));
      const Vec3 Xxt = (X(i + 1, j + 1) - X(i + 1, j - 1) - X(i - 1, j + 1) +
                        X(i - 1, j - 1)) * (1.0 / (4.0 * dx * dt));
      const Vec3& n = mesh.states.at(i, j).e3;
      const double l = dot(n, Xxx), mcoef = dot(n, Xxt), nn = dot(n, Xtt);

      const FrameCoeffs& fr = frames.at(i, j);
      const double f11 = fr.f[0][0], f21 = fr.f[1][0], f12 = fr.f[0][1],
                   f22 = fr.f[1][1];
      // II in coordinates equals S * (a, b, c) with the rows below.
      const double S[9] = {f11 * f11, 2 * f11 * f21, f21 * f21,
                           f11 * f12, f11 * f22 + f12 * f21, f21 * f22,
                           f12 * f12, 2 * f12 * f22, f22 * f22};
      const double rhs[3] = {l, mcoef, nn};
      const double det = S[0] * (S[4] * S[8] - S[5] * S[7]) -
                         S[1] * (S[3] * S[8] - S[5] * S[6]) +
                         S[2] * (S[3] * S[7] - S[4] * S[6]);
      if (std::abs(det) < eps_det) throw DegenerateMetric("coframe conversion singular");
      auto solve_col = [&](int col) {
        double M[9];
        std::copy(S, S + 9, M);
        for (int r = 0; r < 3; ++r) M[r * 3 + col] = rhs[r];
        return (M[0] * (M[4] * M[8] - M[5] * M[7]) -
                M[1] * (M[3] * M[8] - M[5] * M[6]) +
                M[2] * (M[3] * M[7] - M[4] * M[6])) / det;
      };
      RecoveredSff& r = out.at(i, j);
      r.a = solve_col(0);
      r.b = solve_col(1);
      r.c = solve_col(2);
      r.valid = true;
    }
  return out;
}

int export_obj(const Mesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os.good()) throw IoError("cannot open '" + path + "' for writing");
  os.precision(6);
  const int nx = mesh.states.nx(), nt = mesh.states.nt();
  os << "# immersed pseudospherical patch, " << nx << "x" << nt << " grid\n";
  os << "# anchor convention: position 0, frame = standard basis at the"
        " lower-left unmasked corner\n";

  std::vector<int> index(static_cast<std::size_t>(nx) * nt, 0);
  int next = 1;
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!mesh.valid(i, j)) continue;
      index[static_cast<std::size_t>(j) * nx + i] = next++;
      const FrameState& s = mesh.states.at(i, j);
      os << "v " << s.X.x << " " << s.X.y << " " << s.X.z << "\n";
    }
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!mesh.valid(i, j)) continue;
      const FrameState& s = mesh.states.at(i, j);
      os << "vn " << s.e3.x << " " << s.e3.y << " " << s.e3.z << "\n";
    }
  int faces = 0;
  for (int j = 0; j + 1 < nt; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const int v00 = index[static_cast<std::size_t>(j) * nx + i];
      const int v10 = index[static_cast<std::size_t>(j) * nx + i + 1];
      const int v11 = index[static_cast<std::size_t>(j + 1) * nx + i + 1];
      const int v01 = index[static_cast<std::size_t>(j + 1) * nx + i];
      if (v00 && v10 && v11 && v01) {
        os << "f " << v00 << " " << v10 << " " << v11 << " " << v01 << "\n";
        ++faces;
      }
    }
  if (faces == 0) os << "# warning: no unmasked faces\n";
  if (!os.good()) throw IoError("write failure on '" + path + "'");
  return faces;
}

}  // namespace pss
