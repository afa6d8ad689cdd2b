#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "acil/barrier.hpp"
#include "acil/basis.hpp"
#include "acil/common.hpp"
#include "acil/dynamics.hpp"
#include "acil/lagrange.hpp"

namespace acil {

struct CriticState {
    Vector W_c;    // b
    Matrix Gamma;  // b x b, symmetric positive definite
};

struct ActorState {
    Vector W_a;          // b
    double W_a_bar = 0;  // projection radius, |W_a| <= W_a_bar
};

struct AcGains {
    double eta_c1 = 0.1;
    double eta_c2 = 1.0;
    // The actor must track the critic for the control law to carry the
    // learned value function: eta_a1 >> eta_a2, with eta_a2 a small leak.
    double eta_a1 = 1.0;
    double eta_a2 = 0.1;
    double nu = 5.0;
    double beta = 0.01;  // forgetting factor
};

/// One Bellman-error evaluation: residual delta, critic regressor
/// omega = d(delta)/d(W_c), and normalizer rho = sqrt(1 + nu*omega'Gamma*omega).
struct BeSample {
    double delta = 0.0;
    Vector omega;
    double rho = 1.0;
};

/// Inputs of the actor law at one evaluation point.
struct ActorSample {
    Vector omega;
    double rho = 1.0;
    Matrix Rs;  // grad_phi R_g grad_phi', b x b
};

double value_hat(const Vector& x, const CriticState& critic, const BasisFn& basis);

/// u_hat = -R^-1 g(x)' [grad_phi' W_a + lambda_hat * grad B].
Vector control_hat(const Vector& x, const ActorState& actor, const Vector& theta_hat,
                   const SoftplusParams& sp, const SystemModel& model,
                   const BarrierFn& barrier, const BasisFn& basis);

/// Bellman error at x_eval under the current estimates:
/// delta = r(x, u_hat) + (grad_phi' W_c + lambda_hat grad B)'(f_hat + g u_hat).
BeSample bellman_error(const Vector& x_eval, const CriticState& critic,
                       const ActorState& actor, const Vector& theta_hat,
                       const SoftplusParams& sp, const SystemModel& model,
                       const BarrierFn& barrier, const BasisFn& basis,
                       const AcGains& gains);

enum class ExtrapolationPolicy { fixed, resample_each_step };

struct ExtrapolationSet {
    std::vector<Vector> points;
    ExtrapolationPolicy policy = ExtrapolationPolicy::fixed;
};

/// N interior points by rejection sampling over `box`; deterministic for a
/// fixed seed. Throws SamplingError after 1e5*N failed draws.
ExtrapolationSet sample_extrapolation(const BarrierFn& barrier, int N, std::uint64_t seed,
                                      const Box& box);

/// W_c rate: -eta_c1 Gamma (w/rho^2) d - (eta_c2/N) Gamma sum_i (w_i/rho_i^2) d_i.
/// samples[0] is the on-trajectory term; the rest are extrapolated. Throws
/// std::invalid_argument when no extrapolated samples exist but eta_c2 > 0.
Vector critic_derivative(const CriticState& critic, std::span<const BeSample> samples,
                         const AcGains& gains);

/// Gamma rate: beta*Gamma - eta_c1 Gamma psi Gamma - (eta_c2/N) Gamma sum psi_i Gamma
/// with psi = w w'/rho^2; returned symmetric.
Matrix gamma_derivative(const CriticState& critic, std::span<const BeSample> samples,
                        const AcGains& gains);

/// Actor rate with the boundary projection applied: on the W_a_bar sphere an
/// outward-pointing raw rate loses its radial component.
Vector actor_derivative(const ActorState& actor, const CriticState& critic,
                        std::span<const ActorSample> samples, const AcGains& gains);

struct ExcitationMetrics {
    double c1 = 0.0;  // lambda_min of the on-trajectory integral of psi
    double c2 = 0.0;  // inf over time of lambda_min of the extrapolated average
    double c3 = 0.0;  // lambda_min of the integral of the extrapolated average
};

/// Streaming accumulator for the excitation conditions; feed every step of an
/// episode in order.
class ExcitationAccumulator {
public:
    explicit ExcitationAccumulator(int b);
    void add(const BeSample& on_traj, std::span<const BeSample> extrapolated, double dt);
    ExcitationMetrics finish() const;
    bool empty() const { return empty_; }

private:
    Matrix int_psi_;
    Matrix int_psi_mean_;
    double inf_min_eig_ = 0.0;
    bool empty_ = true;
};

/// One episode step of excitation history.
struct StepSignals {
    BeSample on_traj;
    std::vector<BeSample> extrapolated;
};

ExcitationMetrics excitation_metrics(std::span<const StepSignals> history, double dt);

}  // namespace acil
