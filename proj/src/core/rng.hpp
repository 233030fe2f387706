#pragma once

#include <cstdint>
#include <random>

namespace oemdec {

// Deterministic sampling front-end. All draws are derived from a single
// mt19937_64 stream through fixed algorithms (no library distributions),
// so a seed reproduces the same sequence on every build of this project.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t integer() { return gen_(); }

  // Uniform on (0,1), never returns an exact endpoint.
  double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

  double normal();
  double exponential();

  // Shape-scale Gamma (Marsaglia-Tsang), any shape > 0.
  double gamma(double shape, double scale);

  // Inverse-Gamma with density proportional to v^{-shape-1} exp(-scale_b / v).
  double inv_gamma(double shape, double scale_b);

  // Normal(mu, sigma^2) conditioned on the result being >= lo.
  double trunc_normal_lower(double mu, double sigma, double lo = 0.0);

 private:
  std::mt19937_64 gen_;
};

// SplitMix64 hash step; used to derive independent per-cell seeds.
uint64_t splitmix64(uint64_t x);
uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b = 0, uint64_t c = 0);

}  // namespace oemdec
