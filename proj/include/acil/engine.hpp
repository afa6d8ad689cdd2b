#pragma once

#include <functional>
#include <vector>

#include "acil/actor_critic.hpp"
#include "acil/barrier.hpp"
#include "acil/basis.hpp"
#include "acil/common.hpp"
#include "acil/dynamics.hpp"
#include "acil/identifier.hpp"
#include "acil/lagrange.hpp"

namespace acil {

enum class ControllerMode { acil, constant_lambda, naive_lambda, safe_feasible };

const char* to_string(ControllerMode mode);
ControllerMode controller_mode_from(const std::string& name);

struct Hyperparams {
    AcGains ac;
    double k = 0.02;
    double k_sb = 0.2;
    double W_a_bar = 0.0;  // <= 0 selects 10*|W_a(0)| (10 if that is ~0)
    int N = 20;
    ExtrapolationPolicy extrap_policy = ExtrapolationPolicy::fixed;
    // Extrapolation points are drawn from {x : B_f(x) <= extrap_B_cap}. Near
    // the boundary the safeguarding term makes the Bellman-error targets grow
    // without bound, which no finite basis can fit; <= 0 disables the cap.
    double extrap_B_cap = 10.0;
    double k_theta = 5.0;
    double id_window = 0.5;
    int id_capacity = 20;
    double id_gain = 1.0;
    double c_b = 0.075;  // constant-multiplier baseline gain
};

struct Scenario {
    SystemModel system;
    BarrierFn barrier;
    BasisFn basis;
    Vector x0;
    ControllerMode mode = ControllerMode::acil;
    Vector Wc0;
    Vector Wa0;
    Matrix Gamma0;
    Vector theta_hat0;
    bool known_theta = false;  // freeze theta_hat at theta_true
    Box sample_box;
    std::uint64_t seed = 1;
};

struct SimConfig {
    double dt = 1e-3;
    double horizon = 20.0;
    int log_decimation = 1;
    Hyperparams hp;
    Scenario scenario;
};

struct StepRecord {
    double t = 0.0;
    Vector x;
    Vector u;
    double lambda = 0.0;
    double B_f = 0.0;
    double J = 0.0;
    Vector W_c;
    Vector W_a;
    Vector theta_hat;
    double c_s = 0.0;
    double r_bf = 0.0;
    double gamma_min_eig = 0.0;
    double excitation = 0.0;
};

struct EpisodeSummary {
    double total_cost = 0.0;
    double max_B_f = 0.0;
    double max_state_norm = 0.0;
    bool safe = true;
    long steps = 0;
    double gamma_min_eig_floor = 0.0;
    double max_W_a_norm = 0.0;
    double theta_err_final = 0.0;
    ExcitationMetrics excitation;
};

struct EpisodeLog {
    int n = 0, m = 0, b = 0, p = 0;
    double dt = 0.0;
    std::vector<StepRecord> records;
    EpisodeSummary summary;
};

/// Classical RK4 step over an arbitrary field. Throws IntegrationError when a
/// stage derivative is non-finite.
Vector rk4_step(const std::function<Vector(double, const Vector&)>& field,
                const Vector& state, double t, double dt);

/// Integrates the closed loop (plant, critic, actor, gain matrix, identifier,
/// cost) over the horizon. A safety violation (interior membership lost or
/// B_f >= 1e9) ends the episode early with summary.safe == false; numerical
/// blow-up inside the safe set raises IntegrationError.
EpisodeLog run_episode(const SimConfig& cfg);

/// Terminal accumulated cost of a completed episode.
double cost_of(const EpisodeLog& log);

/// u_safe = -[grad B' g]^+ grad B' f(x,theta); renders dB/dt = 0. Throws
/// FeasibilityError when |grad B' g| < 1e-12.
Vector safe_feasible_control(const Vector& x, const SystemModel& model,
                             const BarrierFn& barrier, const Vector& theta);

void validate_config(const SimConfig& cfg);

}  // namespace acil
