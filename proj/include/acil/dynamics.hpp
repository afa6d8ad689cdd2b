#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "acil/common.hpp"

namespace acil {

/// Control-affine plant  xdot = f0(x) + Y(x)*theta + g(x)*u  with the
/// uncertain drift linearly parameterized by theta. f0 carries the part of
/// the drift that is known exactly (e.g. pure kinematics) and is empty for
/// most systems; the identifier only ever estimates theta.
struct SystemModel {
    std::string name;
    int n = 0;  // state dimension
    int m = 0;  // input dimension
    int p = 0;  // unknown parameter dimension

    std::function<Matrix(const Vector&)> regressor;       // Y(x), n x p
    std::function<Vector(const Vector&)> known_drift;     // f0(x), n
    std::function<Matrix(const Vector&)> control_matrix;  // g(x), n x m
    bool constant_g = false;

    Vector theta_true;  // plant/oracle use only
    Matrix R;           // m x m, symmetric positive definite
    std::function<double(const Vector&)> state_cost;  // Q(x) >= 0, Q(0) = 0
};

enum class BuiltinSystem { delta_wing, minefield_robot };

/// Y(x). Throws std::invalid_argument on dimension mismatch.
Matrix regressor_eval(const SystemModel& model, const Vector& x);

/// Full drift f0(x) + Y(x)*theta.
Vector drift_eval(const SystemModel& model, const Vector& x, const Vector& theta);

/// f0(x) + Y(x)*theta + g(x)*u.
Vector dynamics_eval(const SystemModel& model, const Vector& x, const Vector& u,
                     const Vector& theta);

SystemModel builtin_system(BuiltinSystem which);

/// Lookup by config name: "delta_wing", "minefield_robot", or the
/// demonstration system "radial_drift" (xdot = theta*x + u).
SystemModel system_by_name(std::string_view name);

/// 2-state plant with scalar radial drift, used to demonstrate how a wrong
/// drift estimate defeats the naive multiplier.
SystemModel radial_drift_system(double theta_true = -0.5);

/// Validates dimensions and basic invariants of a user-supplied model by
/// probing the callables; throws std::invalid_argument on any mismatch.
void validate_system(const SystemModel& model);

}  // namespace acil
