#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "acil/common.hpp"

namespace acil {

/// Value-function feature map phi with phi(0) = 0 and grad phi(0) = 0.
/// grad_phi(x) is b x n: row i holds the gradient of feature i.
struct BasisFn {
    std::string name;
    int b = 0;    // feature count
    int dim = 0;  // state dimension
    std::function<Vector(const Vector&)> phi;
    std::function<Matrix(const Vector&)> grad_phi;
};

/// [phi^2, p^2, phi*p, phi^3*p] for the wing-rock state [phi, p].
BasisFn wing_rock_basis();

/// [x1^2, x1*x2, x2^2].
BasisFn quadratic2_basis();

BasisFn basis_by_name(std::string_view name);

/// Probes the callables at 0 for the required vanishing conditions; throws
/// std::invalid_argument on violation.
void validate_basis(const BasisFn& basis);

}  // namespace acil
