#include "acil/lagrange.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace acil {

namespace {

constexpr double kGradZeroTol = 1e-12;

Matrix r_g_matrix(const SystemModel& model, const Vector& x) {
    const Matrix g = model.control_matrix(x);
    return g * model.R.llt().solve(g.transpose());
}

}  // namespace

SoftplusParams make_softplus_params(double k, double k_sb, double l_g, double Rg_bar) {
    require(k > 0.0, "softplus gain k must be positive");
    require(k_sb > 0.0, "k_sb must be positive");
    require(l_g > 0.0 && Rg_bar >= l_g, "need 0 < l_g <= Rg_bar");
    SoftplusParams sp;
    sp.k = k;
    sp.k_sb = k_sb;
    sp.l_g = l_g;
    sp.Rg_bar = Rg_bar;
    sp.varsigma = 2.0 * std::log(2.0) * Rg_bar / l_g + 1.0;
    return sp;
}

SoftplusParams softplus_params_for(const SystemModel& model, const BarrierFn& barrier,
                                   double k, double k_sb, const Box& box,
                                   int grid_points_per_axis) {
    auto spectrum = [&](const Vector& x, double& lo, double& hi) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(r_g_matrix(model, x));
        const Vector ev = es.eigenvalues();
        hi = ev.maxCoeff();
        // Rank-deficient R_g: fall back to the smallest positive eigenvalue.
        lo = hi;
        for (int i = 0; i < ev.size(); ++i)
            if (ev[i] > 1e-10 * std::max(hi, 1.0)) lo = std::min(lo, ev[i]);
    };

    double l_g, Rg_bar;
    if (model.constant_g) {
        spectrum(Vector::Zero(model.n), l_g, Rg_bar);
    } else {
        require(box.dim() == model.n, "softplus_params_for: box dimension mismatch");
        const int gp = std::max(grid_points_per_axis, 2);
        double lo_min = std::numeric_limits<double>::infinity();
        double hi_max = 0.0;
        // Grid over the box, keeping interior points only.
        const long total = static_cast<long>(std::pow(gp, model.n));
        for (long flat = 0; flat < total; ++flat) {
            long rem = flat;
            Vector x(model.n);
            for (int d = 0; d < model.n; ++d) {
                const int i = static_cast<int>(rem % gp);
                rem /= gp;
                x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * i / (gp - 1.0);
            }
            if (!barrier.contains(x)) continue;
            double lo, hi;
            spectrum(x, lo, hi);
            lo_min = std::min(lo_min, lo);
            hi_max = std::max(hi_max, hi);
        }
        require(std::isfinite(lo_min) && hi_max > 0.0,
                "softplus_params_for: no interior grid point");
        l_g = 0.9 * lo_min;
        Rg_bar = 1.1 * hi_max;
    }
    return make_softplus_params(k, k_sb, l_g, Rg_bar);
}

Softplus softplus(double z, double k) {
    require(k > 0.0, "softplus: k must be positive");
    const double w = z / k;
    Softplus s;
    if (w > 30.0) {
        const double e = std::exp(-w);
        s.sigma = z + k * e;
        s.d1 = 1.0 / (1.0 + e);
    } else {
        s.sigma = k * std::log1p(std::exp(w));
        s.d1 = 1.0 / (1.0 + std::exp(-w));
    }
    s.d2 = s.d1 * (1.0 - s.d1) / k;
    return s;
}

double r_bf(const Vector& x, const SystemModel& model, const BarrierFn& barrier) {
    const Vector gB = barrier.gradient(x);
    return gB.dot(r_g_matrix(model, x) * gB);
}

double c_s_hat(const Vector& x, const Vector& W_a_hat, const Vector& theta_hat,
               const SystemModel& model, const BarrierFn& barrier, const BasisFn& basis) {
    const Vector gB = barrier.gradient(x);
    const Vector f_hat = drift_eval(model, x, theta_hat);
    const Vector actor_flow = r_g_matrix(model, x) * (basis.grad_phi(x).transpose() * W_a_hat);
    return gB.dot(f_hat) - gB.dot(actor_flow);
}

double lambda_hat(const Vector& x, const Vector& W_a_hat, const Vector& theta_hat,
                  const SoftplusParams& sp, const SystemModel& model,
                  const BarrierFn& barrier, const BasisFn& basis,
                  LagrangeDiagnostics* diag) {
    const double cs = c_s_hat(x, W_a_hat, theta_hat, model, barrier, basis);
    const double rbf = r_bf(x, model, barrier);
    const double lam = softplus(cs / (rbf + sp.k_sb), sp.k).sigma + sp.k * sp.varsigma;
    if (diag) *diag = {cs, rbf, lam, LambdaMode::softplus};
    return lam;
}

double lambda_naive(const Vector& x, const Vector& W_a_hat, const Vector& theta_hat,
                    const SystemModel& model, const BarrierFn& barrier,
                    const BasisFn& basis, LagrangeDiagnostics* diag) {
    const double cs = c_s_hat(x, W_a_hat, theta_hat, model, barrier, basis);
    const double rbf = r_bf(x, model, barrier);
    double lam = 0.0;
    if (barrier.gradient(x).norm() >= kGradZeroTol) {
        // rank-deficient R_g can make rbf vanish with a nonzero gradient;
        // the tiny floor keeps the ratio IEEE-finite
        lam = std::max(cs / std::max(rbf, 1e-30), 0.0);
    }
    if (diag) *diag = {cs, rbf, lam, LambdaMode::naive};
    return lam;
}

double lambda_star_oracle(const Vector& x, const Vector& grad_L_star,
                          const Vector& theta_true, const SystemModel& model,
                          const BarrierFn& barrier, LagrangeDiagnostics* diag) {
    const Vector gB = barrier.gradient(x);
    const double rbf = r_bf(x, model, barrier);
    const double cs =
        gB.dot(drift_eval(model, x, theta_true)) - gB.dot(r_g_matrix(model, x) * grad_L_star);
    double lam = 0.0;
    if (gB.norm() >= kGradZeroTol) lam = std::max(cs / std::max(rbf, 1e-30), 0.0);
    if (diag) *diag = {cs, rbf, lam, LambdaMode::oracle};
    return lam;
}

}  // namespace acil
