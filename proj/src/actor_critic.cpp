#include "acil/actor_critic.hpp"

#include <cmath>
#include <limits>

namespace acil {

double value_hat(const Vector& x, const CriticState& critic, const BasisFn& basis) {
    require(critic.W_c.size() == basis.b, "value_hat: W_c size mismatch");
    return critic.W_c.dot(basis.phi(x));
}

Vector control_hat(const Vector& x, const ActorState& actor, const Vector& theta_hat,
                   const SoftplusParams& sp, const SystemModel& model,
                   const BarrierFn& barrier, const BasisFn& basis) {
    const double lam = lambda_hat(x, actor.W_a, theta_hat, sp, model, barrier, basis);
    const Matrix g = model.control_matrix(x);
    const Vector dir =
        basis.grad_phi(x).transpose() * actor.W_a + lam * barrier.gradient(x);
    return -model.R.llt().solve(g.transpose() * dir);
}

BeSample bellman_error(const Vector& x_eval, const CriticState& critic,
                       const ActorState& actor, const Vector& theta_hat,
                       const SoftplusParams& sp, const SystemModel& model,
                       const BarrierFn& barrier, const BasisFn& basis,
                       const AcGains& gains) {
    const Vector u = control_hat(x_eval, actor, theta_hat, sp, model, barrier, basis);
    const double lam = lambda_hat(x_eval, actor.W_a, theta_hat, sp, model, barrier, basis);
    const Vector F = drift_eval(model, x_eval, theta_hat) + model.control_matrix(x_eval) * u;
    const Matrix grad_phi = basis.grad_phi(x_eval);

    BeSample s;
    s.omega = grad_phi * F;
    const double r = model.state_cost(x_eval) + 0.5 * u.dot(model.R * u);
    s.delta = r + critic.W_c.dot(s.omega) + lam * barrier.gradient(x_eval).dot(F);
    s.rho = std::sqrt(1.0 + gains.nu * s.omega.dot(critic.Gamma * s.omega));
    return s;
}

ExtrapolationSet sample_extrapolation(const BarrierFn& barrier, int N, std::uint64_t seed,
                                      const Box& box) {
    require(N >= 1, "sample_extrapolation: N must be >= 1");
    require(box.dim() == barrier.dim, "sample_extrapolation: box dimension mismatch");
    Rng rng(seed);
    ExtrapolationSet set;
    set.points.reserve(N);
    long draws = 0;
    const long max_draws = 100000L * N;
    while (static_cast<int>(set.points.size()) < N) {
        if (++draws > max_draws)
            throw SamplingError("sample_extrapolation: rejection failure after " +
                                std::to_string(max_draws) + " draws");
        Vector x = rng.uniform_in_box(box);
        if (barrier.contains(x)) set.points.push_back(std::move(x));
    }
    return set;
}

Vector critic_derivative(const CriticState& critic, std::span<const BeSample> samples,
                         const AcGains& gains) {
    require(!samples.empty(), "critic_derivative: empty sample list");
    const size_t N = samples.size() - 1;
    require(N > 0 || gains.eta_c2 == 0.0,
            "critic_derivative: extrapolated samples required when eta_c2 > 0");
    Vector acc = Vector::Zero(critic.W_c.size());
    const auto& on = samples[0];
    acc -= gains.eta_c1 * (on.delta / (on.rho * on.rho)) * on.omega;
    if (N > 0) {
        Vector sum = Vector::Zero(critic.W_c.size());
        for (size_t i = 1; i < samples.size(); ++i) {
            const auto& s = samples[i];
            sum += (s.delta / (s.rho * s.rho)) * s.omega;
        }
        acc -= (gains.eta_c2 / static_cast<double>(N)) * sum;
    }
    return critic.Gamma * acc;
}

Matrix gamma_derivative(const CriticState& critic, std::span<const BeSample> samples,
                        const AcGains& gains) {
    require(!samples.empty(), "gamma_derivative: empty sample list");
    const size_t N = samples.size() - 1;
    const auto& on = samples[0];
    const Eigen::Index b = critic.Gamma.rows();
    Matrix psi = (on.omega * on.omega.transpose()) / (on.rho * on.rho);
    Matrix rate = gains.beta * critic.Gamma - gains.eta_c1 * critic.Gamma * psi * critic.Gamma;
    if (N > 0) {
        Matrix sum = Matrix::Zero(b, b);
        for (size_t i = 1; i < samples.size(); ++i) {
            const auto& s = samples[i];
            sum += (s.omega * s.omega.transpose()) / (s.rho * s.rho);
        }
        rate -= (gains.eta_c2 / static_cast<double>(N)) * critic.Gamma * sum * critic.Gamma;
    }
    return 0.5 * (rate + rate.transpose());
}

Vector actor_derivative(const ActorState& actor, const CriticState& critic,
                        std::span<const ActorSample> samples, const AcGains& gains) {
    require(!samples.empty(), "actor_derivative: empty sample list");
    const size_t N = samples.size() - 1;
    Vector rate = gains.eta_a1 * (critic.W_c - actor.W_a) - gains.eta_a2 * actor.W_a;
    const auto& on = samples[0];
    rate += gains.eta_c1 * (on.omega.dot(critic.W_c) / (4.0 * on.rho)) *
            (on.Rs.transpose() * actor.W_a);
    if (N > 0) {
        Vector sum = Vector::Zero(actor.W_a.size());
        for (size_t i = 1; i < samples.size(); ++i) {
            const auto& s = samples[i];
            sum += (s.omega.dot(critic.W_c) / (4.0 * s.rho)) * (s.Rs.transpose() * actor.W_a);
        }
        rate += (gains.eta_c2 / static_cast<double>(N)) * sum;
    }
    // Tangent projection: drop the outward radial component on the boundary.
    const double norm = actor.W_a.norm();
    if (norm >= actor.W_a_bar && norm > 0.0) {
        const double outward = rate.dot(actor.W_a);
        if (outward > 0.0) rate -= (outward / (norm * norm)) * actor.W_a;
    }
    return rate;
}

ExcitationAccumulator::ExcitationAccumulator(int b)
    : int_psi_(Matrix::Zero(b, b)),
      int_psi_mean_(Matrix::Zero(b, b)),
      inf_min_eig_(std::numeric_limits<double>::infinity()) {}

void ExcitationAccumulator::add(const BeSample& on_traj,
                                std::span<const BeSample> extrapolated, double dt) {
    const Eigen::Index b = int_psi_.rows();
    int_psi_ += dt / (on_traj.rho * on_traj.rho) * (on_traj.omega * on_traj.omega.transpose());
    Matrix mean = Matrix::Zero(b, b);
    if (!extrapolated.empty()) {
        for (const auto& s : extrapolated)
            mean += (s.omega * s.omega.transpose()) / (s.rho * s.rho);
        mean /= static_cast<double>(extrapolated.size());
    }
    int_psi_mean_ += dt * mean;
    Eigen::SelfAdjointEigenSolver<Matrix> es(mean);
    inf_min_eig_ = std::min(inf_min_eig_, es.eigenvalues().minCoeff());
    empty_ = false;
}

ExcitationMetrics ExcitationAccumulator::finish() const {
    ExcitationMetrics m;
    if (empty_) return m;
    Eigen::SelfAdjointEigenSolver<Matrix> e1(int_psi_);
    Eigen::SelfAdjointEigenSolver<Matrix> e3(int_psi_mean_);
    m.c1 = std::max(e1.eigenvalues().minCoeff(), 0.0);
    m.c2 = std::max(inf_min_eig_, 0.0);
    m.c3 = std::max(e3.eigenvalues().minCoeff(), 0.0);
    return m;
}

ExcitationMetrics excitation_metrics(std::span<const StepSignals> history, double dt) {
    require(!history.empty(), "excitation_metrics: empty history");
    ExcitationAccumulator acc(static_cast<int>(history.front().on_traj.omega.size()));
    for (const auto& step : history) acc.add(step.on_traj, step.extrapolated, dt);
    return acc.finish();
}

}  // namespace acil
