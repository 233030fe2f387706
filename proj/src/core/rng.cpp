#include "core/rng.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace oemdec {

double Rng::normal() {
  // Marsaglia polar method; the pair's second component is discarded so the
  // draw count per call is stable.
  while (true) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double Rng::exponential() { return -std::log(uniform()); }

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw ParamError("gamma shape and scale must be > 0");
  if (shape < 1.0) {
    // Boost to shape+1 and correct with a power of a uniform.
    const double g = gamma(shape + 1.0, 1.0);
    return scale * g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

double Rng::inv_gamma(double shape, double scale_b) {
  if (!(shape > 0.0) || !(scale_b > 0.0)) throw ParamError("inv-gamma parameters must be > 0");
  return scale_b / gamma(shape, 1.0);
}

double Rng::trunc_normal_lower(double mu, double sigma, double lo) {
  if (!(sigma > 0.0)) throw ParamError("truncated normal requires sigma > 0");
  const double a = (lo - mu) / sigma;  // standardized lower bound
  if (a < 0.45) {
    // Acceptance probability is at least 1 - Phi(0.45) ~ 0.33.
    while (true) {
      const double z = normal();
      if (z >= a) return mu + sigma * z;
    }
  }
  // Robert (1995) translated-exponential rejection for the tail.
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  while (true) {
    const double z = a + exponential() / lambda;
    const double diff = z - lambda;
    if (std::log(uniform()) <= -0.5 * diff * diff) return mu + sigma * z;
  }
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t s = splitmix64(base ^ 0x6f4a7c15ULL);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  s = splitmix64(s ^ c);
  return s;
}

}  // namespace oemdec
