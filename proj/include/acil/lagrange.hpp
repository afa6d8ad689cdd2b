#pragma once

#include "acil/barrier.hpp"
#include "acil/basis.hpp"
#include "acil/common.hpp"
#include "acil/dynamics.hpp"

namespace acil {

/// Constants behind the softplus multiplier estimate. varsigma is pinned to
/// 2*ln(2)*Rg_bar/l_g + 1 where l_g and Rg_bar bound the spectrum of
/// R_g(x) = g(x) R^-1 g(x)' over the safe set.
struct SoftplusParams {
    double k = 0.02;
    double k_sb = 0.2;
    double l_g = 1.0;
    double Rg_bar = 1.0;
    double varsigma = 0.0;
};

/// Builds SoftplusParams with varsigma computed from l_g and Rg_bar.
SoftplusParams make_softplus_params(double k, double k_sb, double l_g, double Rg_bar);

/// Derives l_g and Rg_bar from the model: exactly for constant g, otherwise
/// from interior grid samples of R_g with a 10% margin on both sides. When
/// R_g is rank deficient (g not full row rank) the smallest positive
/// eigenvalue stands in for l_g, which keeps varsigma finite; the multiplier
/// floor only needs a computable positive constant.
SoftplusParams softplus_params_for(const SystemModel& model, const BarrierFn& barrier,
                                   double k, double k_sb, const Box& box,
                                   int grid_points_per_axis = 11);

struct Softplus {
    double sigma;  // k*ln(1 + exp(z/k))
    double d1;     // sigma'
    double d2;     // sigma''
};

/// Overflow-safe softplus and its first two derivatives. For z/k > 30 the
/// asymptote z + k*exp(-z/k) is used; k as small as 0.02 overflows exp(z/k)
/// for modest z otherwise.
Softplus softplus(double z, double k);

enum class LambdaMode { softplus, naive, oracle };

struct LagrangeDiagnostics {
    double c_s_hat = 0.0;
    double r_bf = 0.0;
    double lambda = 0.0;
    LambdaMode mode = LambdaMode::softplus;
};

/// R_bf(x) = grad B' R_g(x) grad B, nonnegative.
double r_bf(const Vector& x, const SystemModel& model, const BarrierFn& barrier);

/// Estimated barrier derivative under the value part of the control law:
/// grad B' f(x, theta_hat) - grad B' R_g grad_phi' W_a.
double c_s_hat(const Vector& x, const Vector& W_a_hat, const Vector& theta_hat,
               const SystemModel& model, const BarrierFn& barrier, const BasisFn& basis);

/// Softplus multiplier estimate sigma(C_s_hat / (R_bf + k_sb)) + k*varsigma,
/// strictly positive.
double lambda_hat(const Vector& x, const Vector& W_a_hat, const Vector& theta_hat,
                  const SoftplusParams& sp, const SystemModel& model,
                  const BarrierFn& barrier, const BasisFn& basis,
                  LagrangeDiagnostics* diag = nullptr);

/// max(C_s_hat / R_bf, 0) when |grad B| >= 1e-12, else 0. Zero exactly when
/// the estimate claims the state is safe, which is its failure mode.
double lambda_naive(const Vector& x, const Vector& W_a_hat, const Vector& theta_hat,
                    const SystemModel& model, const BarrierFn& barrier,
                    const BasisFn& basis, LagrangeDiagnostics* diag = nullptr);

/// Optimal multiplier for a caller-supplied true value gradient:
/// max(C_s_star / R_bf, 0) when |grad B| >= 1e-12, else 0.
double lambda_star_oracle(const Vector& x, const Vector& grad_L_star,
                          const Vector& theta_true, const SystemModel& model,
                          const BarrierFn& barrier, LagrangeDiagnostics* diag = nullptr);

}  // namespace acil
