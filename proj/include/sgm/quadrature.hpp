#pragma once

#include "sgm/model.hpp"

#include <functional>

namespace sgm {

/// Largest dimension accepted by tensor-product integration.
inline constexpr int kMaxTensorDim = 4;

/// Gauss–Legendre nodes and weights on [0,1]; weights sum to 1.
struct QuadratureRule {
    Vector nodes;
    Vector weights;

    static QuadratureRule gauss_legendre(int points);
    int size() const { return static_cast<int>(nodes.size()); }
};

/// Calls visit(x, w) for every node of the m-fold tensor rule, first axis fastest.
/// Throws ResourceLimit for m > kMaxTensorDim.
void for_each_node(int m, const QuadratureRule& rule, const std::function<void(const Vector&, double)>& visit);

/// ∫_{[0,1]^m} f by the tensor rule.
double integrate(const std::function<double(const Vector&)>& f, int m, const QuadratureRule& rule);

}  // namespace sgm
