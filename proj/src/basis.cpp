#include "acil/basis.hpp"

namespace acil {

BasisFn wing_rock_basis() {
    BasisFn f;
    f.name = "wing_rock";
    f.b = 4;
    f.dim = 2;
    f.phi = [](const Vector& x) {
        const double phi = x[0], p = x[1];
        Vector v(4);
        v << phi * phi, p * p, phi * p, phi * phi * phi * p;
        return v;
    };
    f.grad_phi = [](const Vector& x) {
        const double phi = x[0], p = x[1];
        Matrix G(4, 2);
        G << 2.0 * phi, 0.0,
             0.0, 2.0 * p,
             p, phi,
             3.0 * phi * phi * p, phi * phi * phi;
        return G;
    };
    return f;
}

BasisFn quadratic2_basis() {
    BasisFn f;
    f.name = "quadratic2";
    f.b = 3;
    f.dim = 2;
    f.phi = [](const Vector& x) {
        Vector v(3);
        v << x[0] * x[0], x[0] * x[1], x[1] * x[1];
        return v;
    };
    f.grad_phi = [](const Vector& x) {
        Matrix G(3, 2);
        G << 2.0 * x[0], 0.0,
             x[1], x[0],
             0.0, 2.0 * x[1];
        return G;
    };
    return f;
}

BasisFn basis_by_name(std::string_view name) {
    if (name == "wing_rock") return wing_rock_basis();
    if (name == "quadratic2") return quadratic2_basis();
    throw std::invalid_argument("unknown basis name: '" + std::string(name) + "'");
}

void validate_basis(const BasisFn& basis) {
    require(basis.b > 0 && basis.dim > 0, "basis dimensions must be positive");
    const Vector zero = Vector::Zero(basis.dim);
    const Vector p0 = basis.phi(zero);
    require(p0.size() == basis.b, "phi must return b-vector");
    require(p0.norm() == 0.0, "phi(0) must be 0");
    const Matrix g0 = basis.grad_phi(zero);
    require(g0.rows() == basis.b && g0.cols() == basis.dim, "grad_phi must be b x n");
    require(g0.norm() == 0.0, "grad_phi(0) must be 0");
}

}  // namespace acil
