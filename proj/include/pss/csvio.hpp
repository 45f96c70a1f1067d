#pragma once

#include <string>
#include <vector>

#include "pss/common.hpp"

namespace pss {

// Provenance header lines for every CSV the toolkit writes: family hash,
// seed, tolerances, code version. Keeps runs reproducible and attributable.
struct Provenance {
  std::string family_config;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::vector<std::string> extra;

  std::string header() const;
};

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace pss
