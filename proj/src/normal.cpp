#include "sgm/normal.hpp"

#include <cmath>
#include <numbers>

namespace sgm {

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace sgm
