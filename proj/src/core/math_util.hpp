#pragma once

namespace oemdec {

// Inverse of the standard normal CDF (Wichura's AS 241, double precision).
double normal_quantile(double p);

}  // namespace oemdec
