#pragma once

namespace sgm {

/// Standard normal cumulative distribution function.
double normal_cdf(double z);

}  // namespace sgm
