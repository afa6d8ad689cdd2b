#include "acil/dynamics.hpp"

#include <cmath>

namespace acil {

namespace {

void check_state_dim(const SystemModel& model, const Vector& x) {
    require(x.size() == model.n,
            "state dimension mismatch for system '" + model.name + "': expected " +
                std::to_string(model.n) + ", got " + std::to_string(x.size()));
}

}  // namespace

Matrix regressor_eval(const SystemModel& model, const Vector& x) {
    check_state_dim(model, x);
    Matrix Y = model.regressor(x);
    require(Y.rows() == model.n && Y.cols() == model.p,
            "regressor returned wrong shape for system '" + model.name + "'");
    return Y;
}

Vector drift_eval(const SystemModel& model, const Vector& x, const Vector& theta) {
    check_state_dim(model, x);
    require(theta.size() == model.p,
            "parameter dimension mismatch: expected " + std::to_string(model.p) +
                ", got " + std::to_string(theta.size()));
    Vector f = model.known_drift ? model.known_drift(x) : Vector::Zero(model.n);
    if (model.p > 0) f += model.regressor(x) * theta;
    return f;
}

Vector dynamics_eval(const SystemModel& model, const Vector& x, const Vector& u,
                     const Vector& theta) {
    require(u.size() == model.m,
            "input dimension mismatch: expected " + std::to_string(model.m) + ", got " +
                std::to_string(u.size()));
    return drift_eval(model, x, theta) + model.control_matrix(x) * u;
}

SystemModel builtin_system(BuiltinSystem which) {
    SystemModel s;
    switch (which) {
        case BuiltinSystem::delta_wing: {
            // Wing-rock roll dynamics: phi_dot = p (known),
            // p_dot = th1*phi + th2*p + th3*|phi|p + th4*|p|p + th5*phi^3 + 0.75*u.
            s.name = "delta_wing";
            s.n = 2;
            s.m = 1;
            s.p = 5;
            s.regressor = [](const Vector& x) {
                const double phi = x[0], p = x[1];
                Matrix Y = Matrix::Zero(2, 5);
                Y(1, 0) = phi;
                Y(1, 1) = p;
                Y(1, 2) = std::abs(phi) * p;
                Y(1, 3) = std::abs(p) * p;
                Y(1, 4) = phi * phi * phi;
                return Y;
            };
            s.known_drift = [](const Vector& x) {
                Vector f(2);
                f << x[1], 0.0;
                return f;
            };
            s.control_matrix = [](const Vector&) {
                Matrix g(2, 1);
                g << 0.0, 0.75;
                return g;
            };
            s.constant_g = true;
            s.theta_true = Vector(5);
            s.theta_true << -0.018, 0.015, -0.062, 0.009, 0.021;
            s.R = Matrix::Identity(1, 1);
            s.state_cost = [](const Vector& x) { return x.squaredNorm(); };
            break;
        }
        case BuiltinSystem::minefield_robot: {
            // Single integrator xdot = u; no drift parameters to identify.
            s.name = "minefield_robot";
            s.n = 2;
            s.m = 2;
            s.p = 0;
            s.regressor = [](const Vector&) { return Matrix::Zero(2, 0); };
            s.known_drift = [](const Vector&) { return Vector::Zero(2); };
            s.control_matrix = [](const Vector&) { return Matrix::Identity(2, 2); };
            s.constant_g = true;
            s.theta_true = Vector(0);
            s.R = Matrix::Identity(2, 2);
            s.state_cost = [](const Vector& x) { return x.squaredNorm(); };
            break;
        }
    }
    return s;
}

SystemModel radial_drift_system(double theta_true) {
    SystemModel s;
    s.name = "radial_drift";
    s.n = 2;
    s.m = 2;
    s.p = 1;
    s.regressor = [](const Vector& x) {
        Matrix Y(2, 1);
        Y.col(0) = x;
        return Y;
    };
    s.known_drift = [](const Vector&) { return Vector::Zero(2); };
    s.control_matrix = [](const Vector&) { return Matrix::Identity(2, 2); };
    s.constant_g = true;
    s.theta_true = Vector::Constant(1, theta_true);
    s.R = Matrix::Identity(2, 2);
    s.state_cost = [](const Vector& x) { return x.squaredNorm(); };
    return s;
}

SystemModel system_by_name(std::string_view name) {
    if (name == "delta_wing") return builtin_system(BuiltinSystem::delta_wing);
    if (name == "minefield_robot") return builtin_system(BuiltinSystem::minefield_robot);
    if (name == "radial_drift") return radial_drift_system();
    throw std::invalid_argument("unknown system name: '" + std::string(name) + "'");
}

void validate_system(const SystemModel& model) {
    require(model.n > 0 && model.m > 0 && model.p >= 0, "system dimensions must be positive");
    require(static_cast<bool>(model.regressor) || model.p == 0,
            "regressor callable required when p > 0");
    require(static_cast<bool>(model.control_matrix), "control_matrix callable required");
    require(static_cast<bool>(model.state_cost), "state_cost callable required");
    require(model.theta_true.size() == model.p, "theta_true must have length p");
    require(model.R.rows() == model.m && model.R.cols() == model.m, "R must be m x m");
    require((model.R - model.R.transpose()).norm() < 1e-12 * (1.0 + model.R.norm()),
            "R must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(model.R);
    require(es.eigenvalues().minCoeff() > 0.0, "R must be positive definite");

    const Vector x0 = Vector::Zero(model.n);
    if (model.p > 0) {
        Matrix Y = model.regressor(x0);
        require(Y.rows() == model.n && Y.cols() == model.p, "regressor shape must be n x p");
    }
    Matrix g = model.control_matrix(x0);
    require(g.rows() == model.n && g.cols() == model.m, "control_matrix shape must be n x m");
    if (model.known_drift) {
        require(model.known_drift(x0).size() == model.n, "known_drift must return n-vector");
    }
    require(std::abs(model.state_cost(x0)) == 0.0, "Q(0) must be 0");
}

}  // namespace acil
