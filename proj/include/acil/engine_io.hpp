#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "acil/engine.hpp"

namespace acil {

/// Trajectory CSV. Column order: t, x1..xn, u1..um, lambda_hat, B_f, J,
/// Wc1..Wcb, Wa1..Wab, theta1..thetap, C_s_hat, R_bf, lambda_min_Gamma,
/// excitation_level. Values are printed with round-trip precision.
void write_csv(const EpisodeLog& log, std::ostream& os);

/// Plot-ready CSV: t, B_f, u_norm, lambda_hat.
void write_plot_csv(const EpisodeLog& log, std::ostream& os);

/// Machine-readable one-line summary, "key=value" pairs separated by spaces.
std::string summary_line(const EpisodeLog& log);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(std::istream& is);

/// Writes trajectory CSV, plot CSV and summary under `dir` with the given
/// file stem; creates the directory if needed. Returns the summary line.
std::string write_episode_artifacts(const EpisodeLog& log, const std::string& dir,
                                    const std::string& stem);

}  // namespace acil
