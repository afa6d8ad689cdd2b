#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "acil/barrier.hpp"
#include "acil/basis.hpp"
#include "acil/dynamics.hpp"
#include "acil/engine.hpp"
#include "acil/engine_io.hpp"
#include "acil/lagrange.hpp"
#include "acil/scenario.hpp"

#include <sstream>

namespace py = pybind11;
using namespace acil;

namespace {

py::dict log_to_dict(const EpisodeLog& log) {
    const auto S = static_cast<Eigen::Index>(log.records.size());
    Vector t(S), lam(S), Bf(S), J(S), cs(S), rbf(S), gme(S), exc(S);
    Matrix x(S, log.n), u(S, log.m), Wc(S, log.b), Wa(S, log.b), th(S, log.p);
    for (Eigen::Index i = 0; i < S; ++i) {
        const StepRecord& r = log.records[static_cast<size_t>(i)];
        t[i] = r.t;
        lam[i] = r.lambda;
        Bf[i] = r.B_f;
        J[i] = r.J;
        cs[i] = r.c_s;
        rbf[i] = r.r_bf;
        gme[i] = r.gamma_min_eig;
        exc[i] = r.excitation;
        x.row(i) = r.x;
        u.row(i) = r.u;
        Wc.row(i) = r.W_c;
        Wa.row(i) = r.W_a;
        th.row(i) = r.theta_hat;
    }
    py::dict d;
    d["t"] = t;
    d["x"] = x;
    d["u"] = u;
    d["lambda_hat"] = lam;
    d["B_f"] = Bf;
    d["J"] = J;
    d["W_c"] = Wc;
    d["W_a"] = Wa;
    d["theta_hat"] = th;
    d["C_s_hat"] = cs;
    d["R_bf"] = rbf;
    d["lambda_min_Gamma"] = gme;
    d["excitation_level"] = exc;

    py::dict s;
    const EpisodeSummary& es = log.summary;
    s["total_cost"] = es.total_cost;
    s["safe"] = es.safe;
    s["steps"] = es.steps;
    s["max_B_f"] = es.max_B_f;
    s["max_state_norm"] = es.max_state_norm;
    s["lambda_min_Gamma_floor"] = es.gamma_min_eig_floor;
    s["max_W_a_norm"] = es.max_W_a_norm;
    s["theta_err_final"] = es.theta_err_final;
    s["c1_hat"] = es.excitation.c1;
    s["c2_hat"] = es.excitation.c2;
    s["c3_hat"] = es.excitation.c3;
    d["summary"] = s;
    return d;
}

ConfigMap dict_to_config(const py::dict& d) {
    ConfigMap map;
    for (const auto& item : d)
        map[py::cast<std::string>(item.first)] = py::cast<std::string>(py::str(item.second));
    return map;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Safe actor-critic controller simulator (native core)";

    py::class_<SystemModel>(m, "SystemModel")
        .def_readonly("name", &SystemModel::name)
        .def_readonly("n", &SystemModel::n)
        .def_readonly("m", &SystemModel::m)
        .def_readonly("p", &SystemModel::p)
        .def_readonly("theta_true", &SystemModel::theta_true)
        .def_readonly("R", &SystemModel::R)
        .def("regressor", &regressor_eval, py::arg("x"))
        .def("drift", &drift_eval, py::arg("x"), py::arg("theta"))
        .def("dynamics", &dynamics_eval, py::arg("x"), py::arg("u"), py::arg("theta"))
        .def("Q", [](const SystemModel& s, const Vector& x) { return s.state_cost(x); });

    m.def("system_by_name", &system_by_name, py::arg("name"));

    py::class_<BarrierFn>(m, "BarrierFn")
        .def_readonly("dim", &BarrierFn::dim)
        .def_readonly("gamma", &BarrierFn::gamma)
        .def("value", [](const BarrierFn& b, const Vector& x) { return b.value(x); })
        .def("gradient", [](const BarrierFn& b, const Vector& x) { return b.gradient(x); })
        .def("contains", [](const BarrierFn& b, const Vector& x) { return b.contains(x); });

    m.def("make_ball_log", &make_ball_log, py::arg("dim"), py::arg("beta"));
    m.def("make_box_log", &make_box_log, py::arg("halfwidths"));
    m.def("make_quartic_ratio", &make_quartic_ratio, py::arg("dim"), py::arg("scale"));
    m.def("make_inverse_obstacle", &make_inverse_obstacle, py::arg("center"),
          py::arg("radius") = 1.0);
    m.def("make_minefield", &make_minefield, py::arg("field_scale"), py::arg("centers"),
          py::arg("radius") = 1.0);
    m.def("default_mine_layout", &default_mine_layout, py::arg("count") = 12,
          py::arg("seed") = 107);
    m.def(
        "estimate_gamma",
        [](const BarrierFn& b, int samples, double halfwidth, std::uint64_t seed) {
            return estimate_gamma(b, samples, Box::centered(b.dim, halfwidth), seed);
        },
        py::arg("barrier"), py::arg("samples"), py::arg("halfwidth"), py::arg("seed") = 0);

    py::class_<BasisFn>(m, "BasisFn")
        .def_readonly("name", &BasisFn::name)
        .def_readonly("b", &BasisFn::b)
        .def("phi", [](const BasisFn& f, const Vector& x) { return f.phi(x); })
        .def("grad_phi", [](const BasisFn& f, const Vector& x) { return f.grad_phi(x); });
    m.def("basis_by_name", &basis_by_name, py::arg("name"));

    m.def(
        "softplus",
        [](double z, double k) {
            const Softplus s = softplus(z, k);
            return py::make_tuple(s.sigma, s.d1, s.d2);
        },
        py::arg("z"), py::arg("k"), "Returns (sigma, sigma', sigma'')");

    py::class_<SoftplusParams>(m, "SoftplusParams")
        .def_readonly("k", &SoftplusParams::k)
        .def_readonly("k_sb", &SoftplusParams::k_sb)
        .def_readonly("l_g", &SoftplusParams::l_g)
        .def_readonly("Rg_bar", &SoftplusParams::Rg_bar)
        .def_readonly("varsigma", &SoftplusParams::varsigma);
    m.def("make_softplus_params", &make_softplus_params, py::arg("k"), py::arg("k_sb"),
          py::arg("l_g"), py::arg("Rg_bar"));
    m.def(
        "softplus_params_for",
        [](const SystemModel& model, const BarrierFn& barrier, double k, double k_sb,
           double halfwidth) {
            return softplus_params_for(model, barrier, k, k_sb,
                                       Box::centered(model.n, halfwidth));
        },
        py::arg("model"), py::arg("barrier"), py::arg("k") = 0.02, py::arg("k_sb") = 0.2,
        py::arg("halfwidth") = 10.0);

    m.def("r_bf", &r_bf, py::arg("x"), py::arg("model"), py::arg("barrier"));
    m.def("c_s_hat", &c_s_hat, py::arg("x"), py::arg("W_a_hat"), py::arg("theta_hat"),
          py::arg("model"), py::arg("barrier"), py::arg("basis"));
    m.def(
        "lambda_hat",
        [](const Vector& x, const Vector& W_a, const Vector& theta, const SoftplusParams& sp,
           const SystemModel& model, const BarrierFn& barrier, const BasisFn& basis) {
            return lambda_hat(x, W_a, theta, sp, model, barrier, basis);
        },
        py::arg("x"), py::arg("W_a_hat"), py::arg("theta_hat"), py::arg("sp"),
        py::arg("model"), py::arg("barrier"), py::arg("basis"));
    m.def(
        "lambda_naive",
        [](const Vector& x, const Vector& W_a, const Vector& theta, const SystemModel& model,
           const BarrierFn& barrier, const BasisFn& basis) {
            return lambda_naive(x, W_a, theta, model, barrier, basis);
        },
        py::arg("x"), py::arg("W_a_hat"), py::arg("theta_hat"), py::arg("model"),
        py::arg("barrier"), py::arg("basis"));
    m.def(
        "lambda_star_oracle",
        [](const Vector& x, const Vector& grad_L, const Vector& theta,
           const SystemModel& model, const BarrierFn& barrier) {
            return lambda_star_oracle(x, grad_L, theta, model, barrier);
        },
        py::arg("x"), py::arg("grad_L_star"), py::arg("theta_true"), py::arg("model"),
        py::arg("barrier"));

    m.def("safe_feasible_control", &safe_feasible_control, py::arg("x"), py::arg("model"),
          py::arg("barrier"), py::arg("theta"));

    m.def(
        "run",
        [](const py::dict& config) { return log_to_dict(run_episode(build_config(dict_to_config(config)).sim)); },
        py::arg("config"),
        "Run one episode from a flat key=value config dict; returns the episode "
        "log as arrays plus a summary dict.");
    m.def(
        "run_config_file",
        [](const std::string& path, const std::vector<std::string>& overrides) {
            ConfigMap map = load_config_file(path);
            apply_overrides(map, overrides);
            return log_to_dict(run_episode(build_config(map).sim));
        },
        py::arg("path"), py::arg("overrides") = std::vector<std::string>{});
    m.def(
        "default_config_keys",
        [](const std::string& system) {
            py::dict d;
            d["system"] = system;
            return d;
        },
        py::arg("system"));
    m.def(
        "write_csv",
        [](const py::dict& config, const std::string& out_dir, const std::string& stem) {
            const EpisodeLog log = run_episode(build_config(dict_to_config(config)).sim);
            return write_episode_artifacts(log, out_dir, stem);
        },
        py::arg("config"), py::arg("out_dir"), py::arg("stem") = "run");
}
