#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pss {

// Error hierarchy. Every module-level failure maps onto one of these so the
// CLI can translate them into exit codes (2 for config/usage, 1 otherwise).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingJetOrder : Error { using Error::Error; };
struct MissingTimeJet : Error { using Error::Error; };
struct CapExceeded : Error { using Error::Error; };
struct GridTooSmall : Error { using Error::Error; };
struct ConstraintViolated : Error { using Error::Error; };
struct FunctionEvalError : Error { using Error::Error; };
struct UnsupportedForExplicitFrame : Error { using Error::Error; };
struct OutsideStrip : Error { using Error::Error; };
struct DegenerateL : Error { using Error::Error; };
struct BadInitialCondition : Error { using Error::Error; };
struct SingularCoefficient : Error { using Error::Error; };
struct DeltaCollapse : Error { using Error::Error; };
struct CflViolation : Error { using Error::Error; };
struct BlowupDetected : Error { using Error::Error; };
struct MaskedRegion : Error { using Error::Error; };
struct FrameDrift : Error { using Error::Error; };
struct DegenerateMetric : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

inline bool is_finite(double v) { return std::isfinite(v); }

// Worker cap: PSS_THREADS, else hardware concurrency.
int worker_count();

// Chunked parallel map over [0, n). body(i) must only write to slot i of its
// own output; reductions are done serially by the caller so results stay
// deterministic regardless of thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Halton low-discrepancy sequence in [0,1)^dim (bases 2,3,5,7,...) with a
// seeded Cranley-Patterson rotation so different seeds decorrelate samples
// while keeping the sweep deterministic.
class HaltonSampler {
 public:
  HaltonSampler(int dim, std::uint64_t seed);
  std::vector<double> next();

 private:
  int dim_;
  std::uint64_t index_ = 0;
  std::vector<double> rot_;
};

// FNV-1a over a string; used for provenance hashes in CSV headers.
std::uint64_t fnv1a(const std::string& text);

std::string version_string();

}  // namespace pss
