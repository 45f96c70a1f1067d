#pragma once

#include <string>
#include <vector>

#include "pss/families.hpp"
#include "pss/grid.hpp"

namespace pss {

enum class PartialMode { kAnalytic, kFiniteDifference };

struct ResidualRow {
  std::string identity;
  double residual = 0.0;   // max scaled residual, or min |value| for the
                           // nondegeneracy-style rows
  bool lower_bound = false;  // true when the row is a "bounded away from 0" check
  int n_samples = 0;
  Jet worst;
  bool pass = false;
};

struct ResidualReport {
  std::vector<ResidualRow> rows;
  int delta = 0;  // resolved sign in the third characterization identity
  bool pass = true;

  std::string to_csv() const;  // columns: identity,max_residual,n_samples,pass
};

// Samples the characterization identities at quasi-random jets inside the box.
// Residuals are scaled by 1 + (largest term magnitude); inequality rows must
// stay above ineq_floor.
ResidualReport theorem1_conditions(const FamilySpec& spec, int n_samples,
                                   const JetBox& box, double tol,
                                   PartialMode mode = PartialMode::kAnalytic,
                                   std::uint64_t seed = 1,
                                   double ineq_floor = 1e-8);

struct StructureResidual {
  Field2D<double> r1, r2, r3;  // interior points only; boundary rows zero
  double max_abs = 0.0;
};

// dOmega residuals along a gridded frame field: grid central differences in
// the interior, combined with the pointwise wedge terms.
StructureResidual structure_residual(const Field2D<FrameCoeffs>& frames);

struct NondegeneracyReport {
  double min_abs_delta12 = 0.0;
  double min_delta13sq_plus_delta23sq = 0.0;
  Mask2D mask;       // 1 where a point falls below threshold
  int masked_count = 0;
  bool pass = false;
};

NondegeneracyReport nondegeneracy(const Field2D<FrameCoeffs>& frames,
                                  double threshold = 1e-8);

}  // namespace pss
