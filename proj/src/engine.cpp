#include "acil/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace acil {

namespace {

constexpr double kBarrierAbort = 1e9;
constexpr double kGradZeroTol = 1e-12;

/// State-dependent quantities at one evaluation point, computed once.
struct PointCache {
    Vector x;
    double Q = 0.0;
    Vector f0;          // known drift
    Matrix Y;           // n x p
    Matrix g;           // n x m
    Matrix RinvgT;      // m x n
    Vector phi;         // b
    Matrix grad_phi;    // b x n
    Vector grad_B;      // n
    double grad_B_norm = 0.0;
    double B = 0.0;
    double r_bf = 0.0;
    Matrix Rs;          // b x b
    Vector gphi_RgB;    // b: grad_phi * R_g * grad_B
};

/// Per-stage controller evaluation at a cached point.
struct StageEval {
    double c_s = 0.0;
    double lambda = 0.0;
    Vector u;
    double running_cost = 0.0;  // Q + 0.5 u'Ru
    BeSample be;
};

/// Stage-1 signals exported from the field for logging, excitation
/// accounting and the identifier segment buffer.
struct StageOneSignals {
    StageEval on;
    std::vector<BeSample> extraps;
    double r_bf = 0.0;
    bool valid = false;
};

struct Workspace {
    const SimConfig* cfg = nullptr;
    const SystemModel* sys = nullptr;
    const BarrierFn* bar = nullptr;
    const BasisFn* basis = nullptr;
    SoftplusParams sp;
    double lambda_const = 0.0;
    double W_a_bar = 0.0;
    std::vector<PointCache> extrap;

    int n = 0, m = 0, b = 0, p = 0;
    // augmented state layout offsets; the quadrature block integrates the
    // regressor and the known part of xdot for the identifier windows
    int off_wc = 0, off_wa = 0, off_gamma = 0, off_theta = 0;
    int off_quad_Y = 0, off_quad_G = 0, off_cost = 0;
    int quad_dim = 0;
    int zdim = 0;
};

PointCache make_cache(const Workspace& ws, const Vector& x) {
    PointCache c;
    c.x = x;
    c.Q = ws.sys->state_cost(x);
    c.f0 = ws.sys->known_drift ? ws.sys->known_drift(x) : Vector::Zero(ws.n);
    c.Y = ws.p > 0 ? ws.sys->regressor(x) : Matrix::Zero(ws.n, 0);
    c.g = ws.sys->control_matrix(x);
    c.RinvgT = ws.sys->R.llt().solve(c.g.transpose());
    c.phi = ws.basis->phi(x);
    c.grad_phi = ws.basis->grad_phi(x);
    c.grad_B = ws.bar->gradient(x);
    c.grad_B_norm = c.grad_B.norm();
    c.B = ws.bar->value(x);
    const Matrix Rg = c.g * c.RinvgT;  // g R^-1 g'
    c.r_bf = c.grad_B.dot(Rg * c.grad_B);
    c.Rs = c.grad_phi * Rg * c.grad_phi.transpose();
    c.gphi_RgB = c.grad_phi * (Rg * c.grad_B);
    return c;
}

double lambda_for_mode(const Workspace& ws, const PointCache& c, double c_s) {
    switch (ws.cfg->scenario.mode) {
        case ControllerMode::acil:
            return softplus(c_s / (c.r_bf + ws.sp.k_sb), ws.sp.k).sigma +
                   ws.sp.k * ws.sp.varsigma;
        case ControllerMode::naive_lambda:
            if (c.grad_B_norm < kGradZeroTol) return 0.0;
            return std::max(c_s / std::max(c.r_bf, 1e-30), 0.0);
        case ControllerMode::constant_lambda:
            return ws.lambda_const;
        case ControllerMode::safe_feasible:
            return 0.0;
    }
    return 0.0;
}

StageEval stage_eval(const Workspace& ws, const PointCache& c,
                     const Eigen::Ref<const Vector>& W_c,
                     const Eigen::Ref<const Vector>& W_a,
                     const Eigen::Ref<const Vector>& theta, const Matrix& Gamma) {
    StageEval e;
    Vector f_hat = c.f0;
    if (ws.p > 0) f_hat += c.Y * theta;
    e.c_s = c.grad_B.dot(f_hat) - c.gphi_RgB.dot(W_a);
    e.lambda = lambda_for_mode(ws, c, e.c_s);
    e.u = -(c.RinvgT * (c.grad_phi.transpose() * W_a + e.lambda * c.grad_B));
    const Vector F = f_hat + c.g * e.u;
    e.be.omega = c.grad_phi * F;
    e.running_cost = c.Q + 0.5 * e.u.dot(ws.sys->R * e.u);
    e.be.delta = e.running_cost + W_c.dot(e.be.omega) + e.lambda * c.grad_B.dot(F);
    e.be.rho = std::sqrt(1.0 + ws.cfg->hp.ac.nu * e.be.omega.dot(Gamma * e.be.omega));
    return e;
}

double min_eig(const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    return es.eigenvalues().minCoeff();
}

}  // namespace

const char* to_string(ControllerMode mode) {
    switch (mode) {
        case ControllerMode::acil: return "acil";
        case ControllerMode::constant_lambda: return "constant_lambda";
        case ControllerMode::naive_lambda: return "naive_lambda";
        case ControllerMode::safe_feasible: return "safe_feasible";
    }
    return "?";
}

ControllerMode controller_mode_from(const std::string& name) {
    if (name == "acil") return ControllerMode::acil;
    if (name == "constant_lambda") return ControllerMode::constant_lambda;
    if (name == "naive_lambda") return ControllerMode::naive_lambda;
    if (name == "safe_feasible") return ControllerMode::safe_feasible;
    throw std::invalid_argument("unknown controller mode: '" + name + "'");
}

Vector rk4_step(const std::function<Vector(double, const Vector&)>& field,
                const Vector& state, double t, double dt) {
    auto eval = [&](double ts, const Vector& zs, int stage) {
        Vector d = field(ts, zs);
        if (!d.allFinite())
            throw IntegrationError("non-finite derivative at t=" + std::to_string(ts) +
                                   " (stage " + std::to_string(stage) + ")");
        return d;
    };
    const Vector k1 = eval(t, state, 1);
    const Vector k2 = eval(t + 0.5 * dt, state + (0.5 * dt) * k1, 2);
    const Vector k3 = eval(t + 0.5 * dt, state + (0.5 * dt) * k2, 3);
    const Vector k4 = eval(t + dt, state + dt * k3, 4);
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector safe_feasible_control(const Vector& x, const SystemModel& model,
                             const BarrierFn& barrier, const Vector& theta) {
    const Vector gB = barrier.gradient(x);
    const Vector w = model.control_matrix(x).transpose() * gB;  // (grad B' g)'
    if (w.norm() < kGradZeroTol)
        throw FeasibilityError("grad B' g vanishes at the requested state");
    const double pressure = gB.dot(drift_eval(model, x, theta));
    return -(pressure / w.squaredNorm()) * w;
}

void validate_config(const SimConfig& cfg) {
    const Scenario& sc = cfg.scenario;
    require(cfg.dt > 0.0, "dt must be positive");
    require(cfg.horizon >= cfg.dt, "horizon must be at least dt");
    require(cfg.log_decimation >= 1, "log_decimation must be >= 1");
    validate_system(sc.system);
    validate_basis(sc.basis);
    require(sc.basis.dim == sc.system.n, "basis dimension must match the system");
    require(sc.barrier.dim == sc.system.n, "barrier dimension must match the system");
    require(sc.x0.size() == sc.system.n, "x0 dimension must match the system");
    require(sc.barrier.contains(sc.x0), "x0 must lie strictly inside the safe set");
    require(sc.Wc0.size() == sc.basis.b && sc.Wa0.size() == sc.basis.b,
            "Wc0/Wa0 must match the basis dimension");
    require(sc.Gamma0.rows() == sc.basis.b && sc.Gamma0.cols() == sc.basis.b,
            "Gamma0 must be b x b");
    require(min_eig(0.5 * (sc.Gamma0 + sc.Gamma0.transpose())) > 0.0,
            "Gamma0 must be positive definite");
    require(sc.theta_hat0.size() == sc.system.p, "theta_hat0 must have length p");
    require(sc.sample_box.dim() == sc.system.n, "sample_box dimension must match");
    require(cfg.hp.N >= 1, "N must be >= 1");
    require(cfg.hp.k > 0.0, "k must be positive");
    require(cfg.hp.k_sb > 0.0, "k_sb must be positive");
    require(cfg.hp.id_window >= cfg.dt, "id_window must be at least dt");
    if (sc.mode == ControllerMode::constant_lambda) {
        const Matrix& R = sc.system.R;
        const double r0 = R(0, 0);
        require((R - r0 * Matrix::Identity(R.rows(), R.cols())).norm() < 1e-12 * (1.0 + r0),
                "constant_lambda requires R to be a scalar multiple of the identity");
    }
}

EpisodeLog run_episode(const SimConfig& cfg) {
    validate_config(cfg);
    const Scenario& sc = cfg.scenario;

    Workspace ws;
    ws.cfg = &cfg;
    ws.sys = &sc.system;
    ws.bar = &sc.barrier;
    ws.basis = &sc.basis;
    ws.n = sc.system.n;
    ws.m = sc.system.m;
    ws.b = sc.basis.b;
    ws.p = sc.system.p;
    ws.sp = softplus_params_for(sc.system, sc.barrier, cfg.hp.k, cfg.hp.k_sb, sc.sample_box);
    // The constant baseline gain relates to a constant multiplier via
    // c_b = R^-1 lambda, with R restricted to scalar multiples of identity.
    ws.lambda_const = cfg.hp.c_b * sc.system.R(0, 0);
    ws.W_a_bar =
        cfg.hp.W_a_bar > 0.0 ? cfg.hp.W_a_bar : 10.0 * std::max(sc.Wa0.norm(), 1.0);

    const bool learning = sc.mode != ControllerMode::safe_feasible;
    const bool identify = learning && ws.p > 0 && !sc.known_theta && cfg.hp.k_theta > 0.0;

    ws.off_wc = ws.n;
    ws.off_wa = ws.off_wc + ws.b;
    ws.off_gamma = ws.off_wa + ws.b;
    ws.off_theta = ws.off_gamma + ws.b * ws.b;
    ws.off_quad_Y = ws.off_theta + ws.p;
    ws.quad_dim = identify ? ws.n * ws.p + ws.n : 0;
    ws.off_quad_G = ws.off_quad_Y + (identify ? ws.n * ws.p : 0);
    ws.off_cost = ws.off_quad_Y + ws.quad_dim;
    ws.zdim = ws.off_cost + 1;
    Rng episode_rng(sc.seed);

    auto resample_points = [&]() {
        ws.extrap.clear();
        ws.extrap.reserve(cfg.hp.N);
        long draws = 0;
        const long max_draws = 100000L * cfg.hp.N;
        while (static_cast<int>(ws.extrap.size()) < cfg.hp.N) {
            if (++draws > max_draws)
                throw SamplingError("extrapolation sampling: rejection failure");
            Vector x = episode_rng.uniform_in_box(sc.sample_box);
            if (!sc.barrier.contains(x)) continue;
            if (cfg.hp.extrap_B_cap > 0.0 && sc.barrier.value(x) > cfg.hp.extrap_B_cap)
                continue;
            ws.extrap.push_back(make_cache(ws, x));
        }
    };
    if (learning) resample_points();

    // Identifier bookkeeping.
    HistoryStack stack;
    stack.capacity = cfg.hp.id_capacity;
    const long window_steps = std::lround(cfg.hp.id_window / cfg.dt);
    stack.window = static_cast<double>(window_steps) * cfg.dt;
    IdentifierState ident;
    ident.theta_hat = sc.known_theta ? sc.system.theta_true : sc.theta_hat0;
    ident.gain = cfg.hp.id_gain * Matrix::Identity(ws.p, ws.p);
    ident.k_theta = cfg.hp.k_theta;
    Matrix id_A = Matrix::Zero(ws.p, ws.p);  // sum Y'Y over the stack
    Vector id_v = Vector::Zero(ws.p);        // sum Y'(dx - G)
    double id_excitation = 0.0;

    // Safe-mode control with the origin special case: no gradient direction
    // and no barrier pressure means u = 0 satisfies dB/dt = 0 already.
    auto safe_mode_control = [&](const PointCache& c) -> Vector {
        const Vector w = c.g.transpose() * c.grad_B;
        Vector f_true = c.f0;
        if (ws.p > 0) f_true += c.Y * sc.system.theta_true;
        const double pressure = c.grad_B.dot(f_true);
        if (w.norm() < kGradZeroTol) {
            if (std::abs(pressure) <= 1e-10) return Vector::Zero(ws.m);
            throw FeasibilityError("grad B' g vanishes under barrier pressure at t>0");
        }
        return -(pressure / w.squaredNorm()) * w;
    };

    // Augmented initial state.
    Vector z = Vector::Zero(ws.zdim);
    z.head(ws.n) = sc.x0;
    z.segment(ws.off_wc, ws.b) = sc.Wc0;
    z.segment(ws.off_wa, ws.b) = sc.Wa0;
    Eigen::Map<Matrix>(z.data() + ws.off_gamma, ws.b, ws.b) = sc.Gamma0;
    if (ws.p > 0) z.segment(ws.off_theta, ws.p) = ident.theta_hat;
    Matrix mark_quad_Y = Matrix::Zero(ws.n, identify ? ws.p : 0);
    Vector mark_quad_G = Vector::Zero(identify ? ws.n : 0);
    Vector mark_x = sc.x0;

    // Closed-loop field over the augmented state; stages falling outside the
    // safe set freeze, the between-step monitor ends such episodes. When
    // `capture` is non-null the stage signals are exported.
    std::vector<BeSample> be_samples;
    std::vector<ActorSample> actor_samples;
    auto field_impl = [&](double /*t*/, const Vector& zs, StageOneSignals* capture) -> Vector {
        Vector dz = Vector::Zero(ws.zdim);
        const auto x = zs.head(ws.n);
        if (!sc.barrier.contains(x)) return dz;

        const PointCache c = make_cache(ws, Vector(x));
        const auto W_c = zs.segment(ws.off_wc, ws.b);
        const auto W_a = zs.segment(ws.off_wa, ws.b);
        const auto theta = zs.segment(ws.off_theta, ws.p);

        if (!learning) {
            const Vector u = safe_mode_control(c);
            dz.head(ws.n) = dynamics_eval(sc.system, c.x, u, sc.system.theta_true);
            dz[ws.off_cost] = c.Q + 0.5 * u.dot(sc.system.R * u);
            if (capture) {
                capture->on.u = u;
                capture->r_bf = c.r_bf;
                capture->valid = true;
            }
            return dz;
        }

        const Matrix Gamma_raw = Eigen::Map<const Matrix>(zs.data() + ws.off_gamma, ws.b, ws.b);
        const Matrix Gamma = 0.5 * (Gamma_raw + Gamma_raw.transpose());

        be_samples.clear();
        actor_samples.clear();
        StageEval on = stage_eval(ws, c, W_c, W_a, theta, Gamma);
        be_samples.push_back(on.be);
        actor_samples.push_back({on.be.omega, on.be.rho, c.Rs});
        for (const auto& pc : ws.extrap) {
            StageEval e = stage_eval(ws, pc, W_c, W_a, theta, Gamma);
            actor_samples.push_back({e.be.omega, e.be.rho, pc.Rs});
            be_samples.push_back(std::move(e.be));
        }

        const CriticState critic{Vector(W_c), Gamma};
        const ActorState actor{Vector(W_a), ws.W_a_bar};

        dz.head(ws.n) = dynamics_eval(sc.system, c.x, on.u, sc.system.theta_true);
        dz.segment(ws.off_wc, ws.b) = critic_derivative(critic, be_samples, cfg.hp.ac);
        dz.segment(ws.off_wa, ws.b) = actor_derivative(actor, critic, actor_samples, cfg.hp.ac);
        Eigen::Map<Matrix>(dz.data() + ws.off_gamma, ws.b, ws.b) =
            gamma_derivative(critic, be_samples, cfg.hp.ac);
        if (identify) {
            if (!stack.entries.empty())
                dz.segment(ws.off_theta, ws.p) =
                    ident.k_theta * (ident.gain * (id_v - id_A * theta.eval()));
            Eigen::Map<Matrix>(dz.data() + ws.off_quad_Y, ws.n, ws.p) = c.Y;
            dz.segment(ws.off_quad_G, ws.n) = c.f0 + c.g * on.u;
        }
        dz[ws.off_cost] = on.running_cost;

        if (capture) {
            capture->extraps.assign(be_samples.begin() + 1, be_samples.end());
            capture->on = std::move(on);
            capture->r_bf = c.r_bf;
            capture->valid = true;
        }
        return dz;
    };

    const long steps = std::lround(cfg.horizon / cfg.dt);
    require(steps >= 1, "horizon shorter than one step");

    EpisodeLog log;
    log.n = ws.n;
    log.m = ws.m;
    log.b = ws.b;
    log.p = ws.p;
    log.dt = cfg.dt;
    log.records.reserve(static_cast<size_t>(steps / cfg.log_decimation + 2));

    EpisodeSummary& sum = log.summary;
    sum.gamma_min_eig_floor = std::numeric_limits<double>::infinity();
    ExcitationAccumulator excitation(ws.b);

    auto base_record = [&](double t, const Vector& zs) {
        StepRecord r;
        r.t = t;
        r.x = zs.head(ws.n);
        r.J = zs[ws.off_cost];
        r.W_c = zs.segment(ws.off_wc, ws.b);
        r.W_a = zs.segment(ws.off_wa, ws.b);
        r.theta_hat = zs.segment(ws.off_theta, ws.p);
        const Matrix Gamma = Eigen::Map<const Matrix>(zs.data() + ws.off_gamma, ws.b, ws.b);
        r.gamma_min_eig = min_eig(0.5 * (Gamma + Gamma.transpose()));
        r.excitation = id_excitation;
        r.u = Vector::Zero(ws.m);
        r.B_f = std::numeric_limits<double>::infinity();
        return r;
    };

    long k = 0;
    bool aborted = false;
    for (; k < steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        const auto x = z.head(ws.n);

        const bool inside = sc.barrier.contains(x);
        const double B =
            inside ? sc.barrier.value(x) : std::numeric_limits<double>::infinity();
        if (!inside || B >= kBarrierAbort) {
            sum.safe = false;
            aborted = true;
            StepRecord r = base_record(t, z);
            if (inside) r.B_f = B;
            log.records.push_back(std::move(r));
            break;
        }

        // Stage 1 of the step, with signal capture for logging/diagnostics.
        StageOneSignals sig;
        const Vector k1 = field_impl(t, z, &sig);
        if (!k1.allFinite())
            throw IntegrationError("non-finite derivative at t=" + std::to_string(t));

        sum.max_B_f = std::max(sum.max_B_f, B);
        sum.max_state_norm = std::max(sum.max_state_norm, x.norm());
        sum.max_W_a_norm = std::max(sum.max_W_a_norm, z.segment(ws.off_wa, ws.b).norm());

        StepRecord rec = base_record(t, z);
        rec.B_f = B;
        rec.u = sig.on.u;
        rec.lambda = sig.on.lambda;
        rec.c_s = sig.on.c_s;
        rec.r_bf = sig.r_bf;
        sum.gamma_min_eig_floor = std::min(sum.gamma_min_eig_floor, rec.gamma_min_eig);
        if ((k % cfg.log_decimation) == 0) log.records.push_back(rec);

        if (learning) excitation.add(sig.on.be, sig.extraps, cfg.dt);

        // Remaining RK4 stages (same arithmetic as rk4_step).
        const Vector k2 = field_impl(t + 0.5 * cfg.dt, z + (0.5 * cfg.dt) * k1, nullptr);
        const Vector k3 = field_impl(t + 0.5 * cfg.dt, z + (0.5 * cfg.dt) * k2, nullptr);
        const Vector k4 = field_impl(t + cfg.dt, z + cfg.dt * k3, nullptr);
        z = z + (cfg.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!z.allFinite())
            throw IntegrationError("non-finite augmented state after step at t=" +
                                   std::to_string(t));

        // Between-step discrete events: Gamma symmetrization, actor
        // retraction, identifier window pushes.
        {
            Eigen::Map<Matrix> Gamma(z.data() + ws.off_gamma, ws.b, ws.b);
            Gamma = 0.5 * (Gamma + Gamma.transpose()).eval();
            auto W_a = z.segment(ws.off_wa, ws.b);
            const double norm = W_a.norm();
            if (norm > ws.W_a_bar) W_a *= (1.0 - 1e-15) * ws.W_a_bar / norm;
        }
        if (identify && (k + 1) % window_steps == 0) {
            HistoryEntry entry;
            entry.script_Y =
                Eigen::Map<const Matrix>(z.data() + ws.off_quad_Y, ws.n, ws.p) - mark_quad_Y;
            entry.script_G = z.segment(ws.off_quad_G, ws.n) - mark_quad_G;
            entry.delta_x = z.head(ws.n) - mark_x;
            mark_quad_Y = Eigen::Map<const Matrix>(z.data() + ws.off_quad_Y, ws.n, ws.p);
            mark_quad_G = z.segment(ws.off_quad_G, ws.n);
            mark_x = z.head(ws.n);
            push_entry(stack, std::move(entry));
            id_A.setZero();
            id_v.setZero();
            for (const auto& entry_j : stack.entries) {
                id_A += entry_j.script_Y.transpose() * entry_j.script_Y;
                id_v += entry_j.script_Y.transpose() * (entry_j.delta_x - entry_j.script_G);
            }
            // Newton-type gain: the regressor monomials are nearly collinear
            // along tame trajectories, so a fixed gain leaves the
            // ill-conditioned directions practically frozen. Normalizing by
            // the information matrix equalizes the rates; the windows are
            // noise-free integrals, so this is safe.
            ident.gain = cfg.hp.id_gain *
                         (id_A + 1e-9 * Matrix::Identity(ws.p, ws.p))
                             .llt()
                             .solve(Matrix::Identity(ws.p, ws.p));
            id_excitation = excitation_level(stack);
        }
        if (learning && cfg.hp.extrap_policy == ExtrapolationPolicy::resample_each_step)
            resample_points();
    }

    if (!aborted) {
        const double t_end = static_cast<double>(steps) * cfg.dt;
        const auto x_end = z.head(ws.n);
        StepRecord r = base_record(t_end, z);
        if (sc.barrier.contains(x_end)) {
            r.B_f = sc.barrier.value(x_end);
            StageOneSignals sig;
            (void)field_impl(t_end, z, &sig);
            if (sig.valid) {
                r.u = sig.on.u;
                r.lambda = sig.on.lambda;
                r.c_s = sig.on.c_s;
                r.r_bf = sig.r_bf;
            }
            sum.max_B_f = std::max(sum.max_B_f, r.B_f);
            sum.max_state_norm = std::max(sum.max_state_norm, x_end.norm());
        } else {
            sum.safe = false;
        }
        log.records.push_back(std::move(r));
    }

    sum.steps = k;
    sum.total_cost = z[ws.off_cost];
    sum.excitation = excitation.empty() ? ExcitationMetrics{} : excitation.finish();
    if (ws.p > 0)
        sum.theta_err_final = (sc.system.theta_true - z.segment(ws.off_theta, ws.p)).norm();
    if (!std::isfinite(sum.gamma_min_eig_floor)) sum.gamma_min_eig_floor = 0.0;
    return log;
}

double cost_of(const EpisodeLog& log) {
    require(!log.records.empty(), "cost_of: episode log is empty");
    return log.summary.total_cost;
}

}  // namespace acil
