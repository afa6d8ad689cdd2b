#pragma once

#include <vector>

#include "acil/common.hpp"
#include "acil/dynamics.hpp"

namespace acil {

/// One integral-regression window: delta_x = script_G + script_Y * theta for
/// the true parameter, where script_Y integrates the regressor and script_G
/// integrates every known term of xdot (known drift plus g*u).
struct HistoryEntry {
    Matrix script_Y;  // n x p
    Vector script_G;  // n
    Vector delta_x;   // n
};

struct HistoryStack {
    std::vector<HistoryEntry> entries;
    int capacity = 20;
    double window = 0.5;  // seconds
};

struct IdentifierState {
    Vector theta_hat;     // p
    Matrix gain;          // p x p, symmetric positive definite
    double k_theta = 5.0;
};

/// Contiguous slice of a trajectory sampled at the engine step size;
/// states[i] and inputs[i] are taken at t0 + i*dt.
struct TrajectorySegment {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<Vector> states;
    std::vector<Vector> inputs;
};

/// Appends an entry. At capacity, evicts the entry whose removal maximizes
/// lambda_min(sum Y'Y), considering the new entry as a candidate too.
void push_entry(HistoryStack& stack, HistoryEntry entry);

/// Integrates the segment into a stack entry (composite Simpson over the
/// sample nodes) and appends it via push_entry. Throws std::invalid_argument
/// if the segment does not span one window.
void push_window(HistoryStack& stack, const TrajectorySegment& segment,
                 const SystemModel& model);

/// theta rate: k_theta * gain * sum_j Y_j'(delta_x_j - G_j - Y_j theta_hat).
/// Zero for an empty stack.
Vector theta_derivative(const IdentifierState& state, const HistoryStack& stack);

/// lambda_min(sum_j Y_j' Y_j); zero for an empty stack or p = 0.
double excitation_level(const HistoryStack& stack);

}  // namespace acil
