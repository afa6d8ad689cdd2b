#include "acil/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace acil {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

const std::set<std::string> kKnownKeys = {
    "system", "controller", "c_b", "x0", "horizon", "dt", "seed", "log_decimation",
    "out_dir", "blf", "blf_scale", "blf_beta", "blf_halfwidths", "field_scale", "mines",
    "mine_radius", "obstacle_center", "obstacle_radius", "basis", "eta_c1", "eta_c2",
    "eta_a1", "eta_a2", "nu", "beta", "k", "k_sb", "W_a_bar", "N", "resample_points",
    "Wc0", "Wa0", "Gamma0", "theta_hat0", "k_theta", "id_window", "id_capacity",
    "id_gain", "known_theta", "sample_halfwidth", "extrap_B_cap"};

class KeyReader {
public:
    explicit KeyReader(const ConfigMap& map) : map_(map) {}

    bool has(const std::string& key) const { return map_.count(key) > 0; }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        return parse_number(key, map_.at(key));
    }

    long integer(const std::string& key, long fallback) const {
        const double v = number(key, static_cast<double>(fallback));
        const long i = std::lround(v);
        require(static_cast<double>(i) == v, "config key '" + key + "' must be an integer");
        return i;
    }

    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string v = map_.at(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw std::invalid_argument("config key '" + key + "' must be a boolean");
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        return has(key) ? map_.at(key) : fallback;
    }

    Vector vector(const std::string& key, const Vector& fallback) const {
        if (!has(key)) return fallback;
        std::string raw = map_.at(key);
        std::replace(raw.begin(), raw.end(), ',', ' ');
        std::istringstream is(raw);
        std::vector<double> vals;
        std::string tok;
        while (is >> tok) vals.push_back(parse_number(key, tok));
        require(!vals.empty(), "config key '" + key + "' must hold numbers");
        Vector v(static_cast<Eigen::Index>(vals.size()));
        for (size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
        return v;
    }

private:
    static double parse_number(const std::string& key, const std::string& text) {
        size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("config key '" + key + "' has a non-numeric value '" +
                                        text + "'");
        }
        require(pos == text.size(),
                "config key '" + key + "' has trailing characters in '" + text + "'");
        return v;
    }

    const ConfigMap& map_;
};

BarrierFn build_barrier(const KeyReader& r, const std::string& kind, int dim,
                        double* sample_halfwidth) {
    if (kind == "quartic_ratio") {
        const double scale = r.number("blf_scale", 2.0);
        *sample_halfwidth = scale;
        return make_quartic_ratio(dim, scale);
    }
    if (kind == "ball_log") {
        const double beta = r.number("blf_beta", 2.0);
        *sample_halfwidth = beta;
        return make_ball_log(dim, beta);
    }
    if (kind == "box_log") {
        const Vector a = r.vector("blf_halfwidths", Vector::Constant(dim, 1.0));
        require(a.size() == dim, "config key 'blf_halfwidths' has wrong dimension");
        *sample_halfwidth = a.maxCoeff();
        return make_box_log(a);
    }
    if (kind == "minefield") {
        const double field = r.number("field_scale", 10.0);
        const double radius = r.number("mine_radius", 1.0);
        const std::string mines = r.text("mines", "default");
        std::vector<Vector> centers =
            mines == "default" ? default_mine_layout() : load_centers(mines);
        *sample_halfwidth = field;
        return make_minefield(field, centers, radius);
    }
    if (kind == "obstacle") {
        Vector center(2);
        center << 2.0, 0.0;
        center = r.vector("obstacle_center", center);
        const double radius = r.number("obstacle_radius", 1.0);
        *sample_halfwidth = std::max(center.norm() + 3.0 * radius, 5.0);
        return make_inverse_obstacle(center, radius);
    }
    throw std::invalid_argument("config key 'blf' has unknown kind '" + kind + "'");
}

}  // namespace

ConfigMap parse_config_text(std::istream& is) {
    ConfigMap map;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos,
                "config line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        require(!key.empty(), "config line " + std::to_string(lineno) + " has an empty key");
        map[key] = value;
    }
    return map;
}

ConfigMap load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config file '" + path + "'");
    return parse_config_text(is);
}

void apply_overrides(ConfigMap& cfg, const std::vector<std::string>& overrides) {
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        require(eq != std::string::npos, "override '" + ov + "' is not key=value");
        cfg[trim(ov.substr(0, eq))] = trim(ov.substr(eq + 1));
    }
}

std::vector<Vector> load_centers(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open centers file '" + path + "'");
    std::vector<Vector> centers;
    std::string line;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::vector<double> vals;
        double v;
        while (ls >> v) vals.push_back(v);
        require(!vals.empty(), "centers file '" + path + "' has a malformed line");
        Vector c(static_cast<Eigen::Index>(vals.size()));
        for (size_t i = 0; i < vals.size(); ++i) c[static_cast<Eigen::Index>(i)] = vals[i];
        centers.push_back(std::move(c));
    }
    return centers;
}

LoadedConfig default_config(const std::string& system_name) {
    ConfigMap map;
    map["system"] = system_name;
    return build_config(map);
}

LoadedConfig build_config(const ConfigMap& map) {
    for (const auto& [key, value] : map) {
        (void)value;
        require(kKnownKeys.count(key) > 0, "unknown config key '" + key + "'");
    }
    KeyReader r(map);

    LoadedConfig out;
    SimConfig& cfg = out.sim;
    Scenario& sc = cfg.scenario;

    const std::string system_name = r.text("system", "");
    require(!system_name.empty(), "config key 'system' is required");
    sc.system = system_by_name(system_name);

    // Scenario defaults, then config overrides.
    std::string blf_kind, basis_name;
    Vector x0, W0;
    double horizon = 20.0;
    double theta0_default = 0.0;
    if (system_name == "delta_wing") {
        blf_kind = "quartic_ratio";
        basis_name = "wing_rock";
        x0 = Vector(2);
        x0 << 1.0, 0.1;
        W0 = Vector(4);
        W0 << 10.0, 10.0, 10.0, 0.0;
        horizon = 20.0;
    } else if (system_name == "minefield_robot") {
        blf_kind = "minefield";
        basis_name = "quadratic2";
        x0 = Vector(2);
        x0 << 4.0, 6.0;
        W0 = Vector(3);
        W0 << 2.0, 0.0, 2.0;
        horizon = 30.0;
    } else {  // radial_drift
        blf_kind = "obstacle";
        basis_name = "quadratic2";
        x0 = Vector(2);
        x0 << 3.2, 0.3;
        W0 = Vector::Zero(3);
        horizon = 12.0;
        theta0_default = 0.1;
    }

    cfg.dt = r.number("dt", 1e-3);
    require(cfg.dt > 0.0, "config key 'dt' must be positive");
    cfg.horizon = r.number("horizon", horizon);
    require(cfg.horizon >= cfg.dt, "config key 'horizon' must be at least dt");
    cfg.log_decimation = static_cast<int>(r.integer("log_decimation", 10));
    require(cfg.log_decimation >= 1, "config key 'log_decimation' must be >= 1");

    sc.mode = controller_mode_from(r.text("controller", "acil"));
    sc.x0 = r.vector("x0", x0);
    sc.seed = static_cast<std::uint64_t>(r.integer("seed", 1));
    sc.known_theta = r.boolean("known_theta", false);

    double sample_halfwidth = 0.0;
    sc.barrier = build_barrier(r, r.text("blf", blf_kind), sc.system.n, &sample_halfwidth);
    sample_halfwidth = r.number("sample_halfwidth", sample_halfwidth);
    require(sample_halfwidth > 0.0, "config key 'sample_halfwidth' must be positive");
    sc.sample_box = Box::centered(sc.system.n, sample_halfwidth);

    sc.basis = basis_by_name(r.text("basis", basis_name));
    sc.Wc0 = r.vector("Wc0", W0);
    sc.Wa0 = r.vector("Wa0", W0);
    const double gamma0 = r.number("Gamma0", 10.0);
    require(gamma0 > 0.0, "config key 'Gamma0' must be positive");
    sc.Gamma0 = gamma0 * Matrix::Identity(sc.basis.b, sc.basis.b);
    sc.theta_hat0 =
        r.vector("theta_hat0", Vector::Constant(sc.system.p, theta0_default));

    Hyperparams& hp = cfg.hp;
    hp.ac.eta_c1 = r.number("eta_c1", 0.1);
    hp.ac.eta_c2 = r.number("eta_c2", 1.0);
    hp.ac.eta_a1 = r.number("eta_a1", 1.0);
    hp.ac.eta_a2 = r.number("eta_a2", 0.1);
    hp.ac.nu = r.number("nu", 5.0);
    hp.ac.beta = r.number("beta", 0.01);
    hp.k = r.number("k", 0.02);
    hp.k_sb = r.number("k_sb", 0.2);
    hp.W_a_bar = r.number("W_a_bar", 0.0);
    hp.N = static_cast<int>(r.integer("N", 20));
    hp.extrap_B_cap = r.number("extrap_B_cap", 10.0);
    hp.extrap_policy = r.boolean("resample_points", false)
                           ? ExtrapolationPolicy::resample_each_step
                           : ExtrapolationPolicy::fixed;
    hp.k_theta = r.number("k_theta", system_name == "radial_drift" ? 0.0 : 5.0);
    hp.id_window = r.number("id_window", 0.5);
    hp.id_capacity = static_cast<int>(r.integer("id_capacity", 20));
    hp.id_gain = r.number("id_gain", 1.0);
    hp.c_b = r.number("c_b", 0.075);

    out.out_dir = r.text("out_dir", "out");

    try {
        validate_config(cfg);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("invalid configuration: ") + e.what());
    }
    return out;
}

}  // namespace acil
