#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "acil/common.hpp"

namespace acil {

/// Barrier function over a safe set: positive in the interior, divergent at
/// the boundary. `contains` tests strict interior membership; `gamma`, when
/// set, is a constant with gamma*|grad B(x)| >= B(x) on the interior
/// (diagnostic only, never used by the controller).
struct BarrierFn {
    int dim = 0;
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    std::function<bool(const Vector&)> contains;
    std::optional<double> gamma;
};

/// Safe set |x| < beta, B = ln(beta^2 / (beta^2 - x'x)), gamma = 0.5*beta.
BarrierFn make_ball_log(int dim, double beta);

/// Safe set |x_i| < a_i, B = sum_i ln(a_i^2 / (a_i^2 - x_i^2)),
/// gamma = 0.5*max_i(a_i).
BarrierFn make_box_log(const Vector& halfwidths);

/// Safe set |x| < c, B = (c^2/(c^2 - x'x) - 1)^2.
BarrierFn make_quartic_ratio(int dim, double scale);

/// Safe set |x - center| > radius, B = 1 / (|x - center|^2 - radius^2).
/// B does not vanish at the origin; used only inside composites.
BarrierFn make_inverse_obstacle(const Vector& center, double radius = 1.0);

/// Pointwise sum of barriers; contains is the conjunction. gamma is left
/// unset (use estimate_gamma for a sampled bound).
BarrierFn compose_sum(const std::vector<BarrierFn>& parts);

/// Quartic field barrier of the given scale plus one inverse obstacle per
/// center.
BarrierFn make_minefield(double field_scale, const std::vector<Vector>& centers,
                         double radius = 1.0);

/// Fixed obstacle layout for the minefield scenario: `count` centers drawn
/// uniformly from the disk of radius 8, redrawing any center closer than 2.5
/// to the origin, to another center, or to one of the scenario start states
/// ([4,6], [-7.5,4.5], [1,-9.2]). Seeded so the layout is a stable default.
std::vector<Vector> default_mine_layout(int count = 12, std::uint64_t seed = 107);

/// Empirical lower bound for a valid gamma: max over interior samples of
/// B(x)/|grad B(x)|, skipping points with |grad B| < 1e-12. Samples are drawn
/// by rejection over `box`. Throws SamplingError if no interior point with a
/// usable gradient is found.
double estimate_gamma(const BarrierFn& b, int samples, const Box& box,
                      std::uint64_t seed = 0);

}  // namespace acil
