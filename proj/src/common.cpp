#include "pss/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <future>
#include <random>
#include <thread>

namespace pss {

int worker_count() {
  if (const char* env = std::getenv("PSS_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const int workers = std::min<std::size_t>(worker_count(), n == 0 ? 1 : n);
  if (workers <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::future<void>> futs;
  futs.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    futs.push_back(std::async(std::launch::async, [lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    }));
  }
  for (auto& f : futs) f.get();
}

namespace {
constexpr int kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19};

double radical_inverse(std::uint64_t i, int base) {
  double inv_base = 1.0 / base;
  double f = inv_base;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv_base;
  }
  return r;
}
}  // namespace

HaltonSampler::HaltonSampler(int dim, std::uint64_t seed) : dim_(dim) {
  if (dim < 1 || dim > 8) throw Error("HaltonSampler: dim must be in [1,8]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  rot_.resize(dim_);
  for (double& r : rot_) r = uni(rng);
  index_ = 17;  // skip the degenerate leading points
}

std::vector<double> HaltonSampler::next() {
  std::vector<double> u(dim_);
  for (int d = 0; d < dim_; ++d) {
    double v = radical_inverse(index_, kHaltonBases[d]) + rot_[d];
    u[d] = v - std::floor(v);
  }
  ++index_;
  return u;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string version_string() { return "0.1.0"; }

}  // namespace pss
