#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pss/common.hpp"

namespace pss {

// Scalar Dormand-Prince 5(4) with dense output and event stopping.
struct Ode45Options {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 1e-4;
  double h_min = 1e-14;
  int max_steps = 200000;
};

// An event function e(x, y); integration stops where e crosses <= 0, located
// by bisection on the dense output to 1e-12 in x.
struct OdeEvent {
  std::string name;
  std::function<double(double, double)> fn;
};

struct Ode45Segment {
  double x0 = 0.0, h = 0.0;
  double y0 = 0.0;
  double rc[5] = {0, 0, 0, 0, 0};  // dense-output coefficients
};

struct Ode45Solution {
  std::vector<Ode45Segment> segments;  // ordered by |x - start|
  double x_start = 0.0, x_end = 0.0;
  bool forward = true;
  bool stopped_by_event = false;
  std::string event_name;

  double eval(double x) const;
  double deriv(double x) const;
  bool covers(double x) const;
};

// Integrates y' = f(x, y) from (x0, y0) toward x_target (either direction).
Ode45Solution ode45_integrate(const std::function<double(double, double)>& f,
                              double x0, double y0, double x_target,
                              const std::vector<OdeEvent>& events = {},
                              const Ode45Options& opts = {});

}  // namespace pss
