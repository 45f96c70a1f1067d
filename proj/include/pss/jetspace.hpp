#pragma once

#include "pss/grid.hpp"
#include "pss/jet_function.hpp"

namespace pss {

// D_x fn = fn_x + sum_i fn_{z_i} z_{i+1}. The jet must carry one order more
// than fn's highest used index.
double total_derivative_x(const ScalarJetFunction& fn, const Jet& jet);

// D_t fn = fn_t + sum_i fn_{z_i} z_{i,t}; zt supplies z_{i,t} for every index
// fn uses (typically from prolong()).
double total_derivative_t(const ScalarJetFunction& fn, const Jet& jet,
                          const std::vector<double>& zt);

inline constexpr int kProlongCap = 6;

// z_{i,t} for i = 0..up_to, from z_{0,t}, z_{1,t} and the right-hand side F:
//   z_{2q,t}   = z_{0,t} - sum_{i=0}^{q-1} D_x^{2i} F,
//   z_{2q+1,t} = z_{1,t} - sum_{i=0}^{q-1} D_x^{2i+1} F.
std::vector<double> prolong(const ScalarJetFunction& F, const Jet& jet,
                            double z0t, double z1t, int up_to);
std::vector<double> prolong(const JetFnPtr& F, const Jet& jet, double z0t,
                            double z1t, int up_to);

enum class Stencil { kOrder2, kOrder4 };

// Central finite-difference jets z_1..z_order at every grid point of every
// snapshot; z_{0,t}, z_{1,t} central in time (one-sided at the first/last
// snapshot, flagged via time_boundary). Requires periodic-in-x data.
struct JetGrid {
  Field2D<Jet> jets;          // nx x nt
  std::vector<bool> time_boundary;  // per snapshot
};

JetGrid extract_jets(const SolutionField& u, int order, Stencil stencil);

}  // namespace pss
