#include "acil/engine_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace acil {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_csv(const EpisodeLog& log, std::ostream& os) {
    os << "t";
    for (int i = 1; i <= log.n; ++i) os << ",x" << i;
    for (int i = 1; i <= log.m; ++i) os << ",u" << i;
    os << ",lambda_hat,B_f,J";
    for (int i = 1; i <= log.b; ++i) os << ",Wc" << i;
    for (int i = 1; i <= log.b; ++i) os << ",Wa" << i;
    for (int i = 1; i <= log.p; ++i) os << ",theta" << i;
    os << ",C_s_hat,R_bf,lambda_min_Gamma,excitation_level\n";
    for (const auto& r : log.records) {
        os << fmt(r.t);
        for (int i = 0; i < log.n; ++i) os << ',' << fmt(r.x[i]);
        for (int i = 0; i < log.m; ++i) os << ',' << fmt(r.u[i]);
        os << ',' << fmt(r.lambda) << ',' << fmt(r.B_f) << ',' << fmt(r.J);
        for (int i = 0; i < log.b; ++i) os << ',' << fmt(r.W_c[i]);
        for (int i = 0; i < log.b; ++i) os << ',' << fmt(r.W_a[i]);
        for (int i = 0; i < log.p; ++i) os << ',' << fmt(r.theta_hat[i]);
        os << ',' << fmt(r.c_s) << ',' << fmt(r.r_bf) << ',' << fmt(r.gamma_min_eig)
           << ',' << fmt(r.excitation) << '\n';
    }
}

void write_plot_csv(const EpisodeLog& log, std::ostream& os) {
    os << "t,B_f,u_norm,lambda_hat\n";
    for (const auto& r : log.records)
        os << fmt(r.t) << ',' << fmt(r.B_f) << ',' << fmt(r.u.norm()) << ','
           << fmt(r.lambda) << '\n';
}

std::string summary_line(const EpisodeLog& log) {
    const EpisodeSummary& s = log.summary;
    std::ostringstream os;
    os << "total_cost=" << fmt(s.total_cost) << " safe=" << (s.safe ? 1 : 0)
       << " steps=" << s.steps << " max_B_f=" << fmt(s.max_B_f)
       << " max_state_norm=" << fmt(s.max_state_norm)
       << " lambda_min_Gamma_floor=" << fmt(s.gamma_min_eig_floor)
       << " max_W_a_norm=" << fmt(s.max_W_a_norm)
       << " theta_err_final=" << fmt(s.theta_err_final)
       << " c1_hat=" << fmt(s.excitation.c1) << " c2_hat=" << fmt(s.excitation.c2)
       << " c3_hat=" << fmt(s.excitation.c3);
    return os.str();
}

int CsvTable::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

CsvTable read_csv(std::istream& is) {
    CsvTable table;
    std::string line;
    if (!std::getline(is, line)) return table;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(table.header.size());
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string write_episode_artifacts(const EpisodeLog& log, const std::string& dir,
                                    const std::string& stem) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream os(fs::path(dir) / (stem + "_trajectory.csv"));
        write_csv(log, os);
    }
    {
        std::ofstream os(fs::path(dir) / (stem + "_plot.csv"));
        write_plot_csv(log, os);
    }
    const std::string summary = summary_line(log);
    {
        std::ofstream os(fs::path(dir) / (stem + "_summary.txt"));
        os << summary << '\n';
    }
    return summary;
}

}  // namespace acil
