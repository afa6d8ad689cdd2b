#include "acil/identifier.hpp"

#include <cmath>
#include <limits>

namespace acil {

namespace {

Matrix info_sum(const HistoryStack& stack, int p) {
    Matrix S = Matrix::Zero(p, p);
    for (const auto& e : stack.entries) S += e.script_Y.transpose() * e.script_Y;
    return S;
}

double min_eig(const Matrix& S) {
    if (S.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    return es.eigenvalues().minCoeff();
}

}  // namespace

void push_window(HistoryStack& stack, const TrajectorySegment& segment,
                 const SystemModel& model) {
    const size_t ns = segment.states.size();
    require(ns >= 2 && segment.inputs.size() == ns,
            "push_window: segment must hold matching state/input samples");
    require(segment.dt > 0.0, "push_window: segment dt must be positive");
    const double span = segment.dt * static_cast<double>(ns - 1);
    require(std::abs(span - stack.window) <= 1e-9 * std::max(1.0, stack.window),
            "push_window: segment span " + std::to_string(span) +
                " does not match window " + std::to_string(stack.window));

    // Composite quadrature weights: Simpson when the interval count is even,
    // with one trapezoid interval in front otherwise.
    const size_t intervals = ns - 1;
    std::vector<double> w(ns, 0.0);
    size_t first = 0;
    if (intervals % 2 == 1) {
        w[0] += 0.5 * segment.dt;
        w[1] += 0.5 * segment.dt;
        first = 1;
    }
    for (size_t i = first; i + 2 < ns; i += 2) {
        w[i] += segment.dt / 3.0;
        w[i + 1] += 4.0 * segment.dt / 3.0;
        w[i + 2] += segment.dt / 3.0;
    }

    HistoryEntry entry;
    entry.script_Y = Matrix::Zero(model.n, model.p);
    entry.script_G = Vector::Zero(model.n);
    for (size_t i = 0; i < ns; ++i) {
        const Vector& x = segment.states[i];
        const Vector& u = segment.inputs[i];
        if (model.p > 0) entry.script_Y += w[i] * model.regressor(x);
        Vector known = model.control_matrix(x) * u;
        if (model.known_drift) known += model.known_drift(x);
        entry.script_G += w[i] * known;
    }
    entry.delta_x = segment.states.back() - segment.states.front();
    push_entry(stack, std::move(entry));
}

void push_entry(HistoryStack& stack, HistoryEntry entry) {
    const int p = static_cast<int>(entry.script_Y.cols());
    stack.entries.push_back(std::move(entry));
    if (static_cast<int>(stack.entries.size()) <= stack.capacity) return;

    // Greedy eviction: drop the entry whose removal leaves the best-conditioned
    // information matrix.
    const Matrix total = info_sum(stack, p);
    double best = -std::numeric_limits<double>::infinity();
    size_t drop = 0;
    for (size_t j = 0; j < stack.entries.size(); ++j) {
        const Matrix& Yj = stack.entries[j].script_Y;
        const double v = min_eig(total - Yj.transpose() * Yj);
        if (v > best) {
            best = v;
            drop = j;
        }
    }
    stack.entries.erase(stack.entries.begin() + static_cast<long>(drop));
}

Vector theta_derivative(const IdentifierState& state, const HistoryStack& stack) {
    const auto p = state.theta_hat.size();
    Vector acc = Vector::Zero(p);
    if (stack.entries.empty() || p == 0) return acc;
    for (const auto& e : stack.entries)
        acc += e.script_Y.transpose() * (e.delta_x - e.script_G - e.script_Y * state.theta_hat);
    return state.k_theta * (state.gain * acc);
}

double excitation_level(const HistoryStack& stack) {
    if (stack.entries.empty()) return 0.0;
    const int p = static_cast<int>(stack.entries.front().script_Y.cols());
    if (p == 0) return 0.0;
    return std::max(min_eig(info_sum(stack, p)), 0.0);
}

}  // namespace acil
