// Command-line front end: single runs, baseline comparisons, and gain sweeps.
#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "acil/engine.hpp"
#include "acil/engine_io.hpp"
#include "acil/scenario.hpp"

namespace fs = std::filesystem;
using namespace acil;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUnsafe = 2;

struct EpisodeJob {
    std::string label;  // row label for tables
    std::string stem;   // artifact file stem
    ConfigMap config;
};

struct EpisodeResult {
    EpisodeJob job;
    bool ran = false;
    bool safe = false;
    double cost = 0.0;
    std::string error;
    std::string summary;
};

EpisodeResult run_job(const EpisodeJob& job, const std::string& out_dir) {
    EpisodeResult res;
    res.job = job;
    try {
        LoadedConfig loaded = build_config(job.config);
        EpisodeLog log = run_episode(loaded.sim);
        res.ran = true;
        res.safe = log.summary.safe;
        res.cost = cost_of(log);
        res.summary = write_episode_artifacts(log, out_dir, job.stem);
    } catch (const std::exception& e) {
        res.error = e.what();
    }
    return res;
}

std::vector<EpisodeResult> run_jobs(const std::vector<EpisodeJob>& jobs,
                                    const std::string& out_dir, int n_jobs) {
    std::vector<EpisodeResult> results(jobs.size());
    if (n_jobs <= 1) {
        for (size_t i = 0; i < jobs.size(); ++i) results[i] = run_job(jobs[i], out_dir);
        return results;
    }
    size_t next = 0;
    while (next < jobs.size()) {
        const size_t batch = std::min<size_t>(n_jobs, jobs.size() - next);
        std::vector<std::future<EpisodeResult>> futs;
        for (size_t i = 0; i < batch; ++i)
            futs.push_back(std::async(std::launch::async, run_job, std::cref(jobs[next + i]),
                                      std::cref(out_dir)));
        for (size_t i = 0; i < batch; ++i) results[next + i] = futs[i].get();
        next += batch;
    }
    return results;
}

std::string format_cell(const EpisodeResult& r) {
    if (!r.ran) return "ERROR";
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << r.cost;
    if (!r.safe) os << " (unsafe)";
    return os.str();
}

void print_aligned(const std::vector<std::vector<std::string>>& rows, std::ostream& os) {
    std::vector<size_t> width;
    for (const auto& row : rows) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i)
            os << std::left << std::setw(static_cast<int>(width[i]) + 2) << row[i];
        os << '\n';
    }
}

std::string vec_to_label(const std::string& raw) {
    std::string s = raw;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::ostringstream os;
    os << '[';
    double v;
    bool first = true;
    while (is >> v) {
        if (!first) os << ',';
        os << v;
        first = false;
    }
    os << ']';
    return os.str();
}

int classify_failure(const std::vector<EpisodeResult>& results) {
    bool any_error = false, any_unsafe = false;
    for (const auto& r : results) {
        if (!r.ran) any_error = true;
        else if (!r.safe) any_unsafe = true;
    }
    if (any_error) return kExitError;
    if (any_unsafe) return kExitUnsafe;
    return kExitOk;
}

const std::set<std::string> kSweepable = {
    "eta_c1", "eta_c2", "eta_a1", "eta_a2", "nu",       "beta",
    "k",      "k_sb",   "W_a_bar", "N",     "k_theta",  "id_window",
    "id_capacity", "id_gain", "c_b", "Gamma0"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safe actor-critic controller simulator"};
    app.require_subcommand(1);

    std::string config_path, out_flag;
    std::vector<std::string> overrides;
    long seed_flag = -1;
    int n_jobs = 1;

    auto add_common = [&](CLI::App* cmd, bool with_jobs) {
        cmd->add_option("--config", config_path, "scenario config file")->required();
        cmd->add_option("--override", overrides, "key=value override (repeatable)");
        cmd->add_option("--out", out_flag, "output directory");
        cmd->add_option("--seed", seed_flag, "episode seed override");
        if (with_jobs) cmd->add_option("--jobs", n_jobs, "parallel episodes");
    };

    auto* run_cmd = app.add_subcommand("run", "run one episode and write its artifacts");
    add_common(run_cmd, false);

    auto* compare_cmd =
        app.add_subcommand("compare", "cost table over controller modes and starts");
    add_common(compare_cmd, true);
    std::vector<std::string> modes = {"acil", "constant_lambda"};
    std::vector<std::string> ics;
    bool known_theta_toggle = false;
    compare_cmd->add_option("--modes", modes, "controller modes")->delimiter(',');
    compare_cmd->add_option("--ic", ics, "initial condition, e.g. \"1,0.1\" (repeatable)");
    compare_cmd->add_flag("--known-theta", known_theta_toggle,
                          "also run variants with the drift parameters known");

    auto* sweep_cmd = app.add_subcommand("sweep", "cost sweep over one hyperparameter");
    add_common(sweep_cmd, true);
    std::string sweep_param;
    std::vector<std::string> sweep_values;
    sweep_cmd->add_option("--param", sweep_param, "hyperparameter key")->required();
    sweep_cmd->add_option("--values", sweep_values, "values to sweep")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    ConfigMap base;
    std::string out_dir;
    try {
        base = load_config_file(config_path);
        apply_overrides(base, overrides);
        if (seed_flag >= 0) base["seed"] = std::to_string(seed_flag);
        LoadedConfig probe = build_config(base);  // validate before any episode
        out_dir = out_flag.empty() ? probe.out_dir : out_flag;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }

    if (*run_cmd) {
        EpisodeJob job{"run", "run", base};
        EpisodeResult res = run_job(job, out_dir);
        if (!res.ran) {
            std::cerr << "error: " << res.error << '\n';
            return kExitError;
        }
        std::cout << res.summary << '\n';
        std::cout << "artifacts: " << (fs::path(out_dir) / "run_trajectory.csv").string()
                  << '\n';
        return res.safe ? kExitOk : kExitUnsafe;
    }

    if (*compare_cmd) {
        // Fall back to the config's own start when none was given.
        if (ics.empty()) {
            LoadedConfig probe = build_config(base);
            std::ostringstream os;
            for (int i = 0; i < probe.sim.scenario.x0.size(); ++i) {
                if (i) os << ',';
                os << probe.sim.scenario.x0[i];
            }
            ics.push_back(os.str());
        }
        std::vector<bool> variants = {false};
        if (known_theta_toggle) variants.push_back(true);

        std::vector<EpisodeJob> jobs;
        for (bool known : variants) {
            for (const auto& mode : modes) {
                for (size_t i = 0; i < ics.size(); ++i) {
                    EpisodeJob job;
                    job.config = base;
                    job.config["controller"] = mode;
                    job.config["x0"] = ics[i];
                    job.config["known_theta"] = known ? "true" : "false";
                    job.label = mode + (known ? " (known theta)" : "");
                    job.stem = "compare_" + mode + (known ? "_known" : "") + "_ic" +
                               std::to_string(i);
                    jobs.push_back(std::move(job));
                }
            }
        }
        std::vector<EpisodeResult> results = run_jobs(jobs, out_dir, n_jobs);

        // Long-format CSV plus an aligned text table, one row per method.
        fs::create_directories(out_dir);
        std::ofstream csv(fs::path(out_dir) / "compare.csv");
        csv << "method,known_theta,x0,cost,safe\n";
        for (const auto& r : results) {
            std::string x0 = r.job.config.at("x0");
            std::replace(x0.begin(), x0.end(), ',', ' ');
            csv << r.job.config.at("controller") << ','
                << r.job.config.at("known_theta") << ',' << x0 << ',';
            if (r.ran)
                csv << std::setprecision(17) << r.cost << ',' << (r.safe ? 1 : 0) << '\n';
            else
                csv << "nan,0\n";
        }

        std::vector<std::vector<std::string>> table;
        std::vector<std::string> head = {"method"};
        for (const auto& ic : ics) head.push_back("x0=" + vec_to_label(ic));
        table.push_back(head);
        size_t idx = 0;
        for (bool known : variants) {
            (void)known;
            for (const auto& mode : modes) {
                std::vector<std::string> row = {results[idx].job.label};
                for (size_t i = 0; i < ics.size(); ++i) row.push_back(format_cell(results[idx + i]));
                idx += ics.size();
                table.push_back(std::move(row));
            }
        }
        std::ostringstream text;
        print_aligned(table, text);
        std::cout << text.str();
        std::ofstream txt(fs::path(out_dir) / "compare.txt");
        txt << text.str();
        for (const auto& r : results)
            if (!r.ran) std::cerr << "error [" << r.job.stem << "]: " << r.error << '\n';
        return classify_failure(results);
    }

    if (*sweep_cmd) {
        if (kSweepable.count(sweep_param) == 0) {
            std::cerr << "error: '" << sweep_param << "' is not a sweepable hyperparameter\n";
            return kExitError;
        }
        if (sweep_values.empty()) {
            std::cerr << "error: sweep needs at least one value\n";
            return kExitError;
        }
        std::vector<EpisodeJob> jobs;
        for (const auto& v : sweep_values) {
            EpisodeJob job;
            job.config = base;
            job.config[sweep_param] = v;
            job.label = sweep_param + "=" + v;
            job.stem = "sweep_" + sweep_param + "_" + v;
            jobs.push_back(std::move(job));
        }
        std::vector<EpisodeResult> results = run_jobs(jobs, out_dir, n_jobs);

        fs::create_directories(out_dir);
        std::ofstream csv(fs::path(out_dir) / ("sweep_" + sweep_param + ".csv"));
        csv << sweep_param << ",cost,safe\n";
        for (const auto& r : results) {
            csv << r.job.config.at(sweep_param) << ',';
            if (r.ran)
                csv << std::setprecision(17) << r.cost << ',' << (r.safe ? 1 : 0) << '\n';
            else
                csv << "nan,0\n";
        }
        std::vector<std::vector<std::string>> table = {{sweep_param, "cost"}};
        for (const auto& r : results) table.push_back({r.job.config.at(sweep_param), format_cell(r)});
        std::ostringstream text;
        print_aligned(table, text);
        std::cout << text.str();
        std::ofstream txt(fs::path(out_dir) / ("sweep_" + sweep_param + ".txt"));
        txt << text.str();
        for (const auto& r : results)
            if (!r.ran) std::cerr << "error [" << r.job.stem << "]: " << r.error << '\n';
        return classify_failure(results);
    }

    return kExitError;
}
