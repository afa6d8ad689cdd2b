#include "acil/barrier.hpp"

#include <cmath>

namespace acil {

BarrierFn make_ball_log(int dim, double beta) {
    require(beta > 0.0, "ball_log: beta must be positive");
    const double beta2 = beta * beta;
    BarrierFn b;
    b.dim = dim;
    b.value = [beta2](const Vector& x) { return std::log(beta2 / (beta2 - x.squaredNorm())); };
    b.gradient = [beta2](const Vector& x) {
        return Vector(2.0 / (beta2 - x.squaredNorm()) * x);
    };
    b.contains = [beta2](const Vector& x) { return x.squaredNorm() < beta2; };
    b.gamma = 0.5 * beta;
    return b;
}

BarrierFn make_box_log(const Vector& halfwidths) {
    require(halfwidths.size() > 0, "box_log: empty halfwidth list");
    require(halfwidths.minCoeff() > 0.0, "box_log: halfwidths must be positive");
    const Vector a2 = halfwidths.array().square();
    BarrierFn b;
    b.dim = static_cast<int>(halfwidths.size());
    b.value = [a2](const Vector& x) {
        double v = 0.0;
        for (int i = 0; i < x.size(); ++i) v += std::log(a2[i] / (a2[i] - x[i] * x[i]));
        return v;
    };
    b.gradient = [a2](const Vector& x) {
        Vector g(x.size());
        for (int i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i] / (a2[i] - x[i] * x[i]);
        return g;
    };
    b.contains = [a2](const Vector& x) {
        for (int i = 0; i < x.size(); ++i)
            if (x[i] * x[i] >= a2[i]) return false;
        return true;
    };
    b.gamma = 0.5 * halfwidths.maxCoeff();
    return b;
}

BarrierFn make_quartic_ratio(int dim, double scale) {
    require(scale > 0.0, "quartic_ratio: scale must be positive");
    const double c2 = scale * scale;
    BarrierFn b;
    b.dim = dim;
    b.value = [c2](const Vector& x) {
        const double h = x.squaredNorm() / (c2 - x.squaredNorm());
        return h * h;
    };
    b.gradient = [c2](const Vector& x) {
        const double d = c2 - x.squaredNorm();
        return Vector(4.0 * c2 * x.squaredNorm() / (d * d * d) * x);
    };
    b.contains = [c2](const Vector& x) { return x.squaredNorm() < c2; };
    return b;
}

BarrierFn make_inverse_obstacle(const Vector& center, double radius) {
    require(radius > 0.0, "inverse_obstacle: radius must be positive");
    const double r2 = radius * radius;
    const Vector c = center;
    BarrierFn b;
    b.dim = static_cast<int>(center.size());
    b.value = [c, r2](const Vector& x) { return 1.0 / ((x - c).squaredNorm() - r2); };
    b.gradient = [c, r2](const Vector& x) {
        const double d = (x - c).squaredNorm() - r2;
        return Vector(-2.0 / (d * d) * (x - c));
    };
    b.contains = [c, r2](const Vector& x) { return (x - c).squaredNorm() > r2; };
    return b;
}

BarrierFn compose_sum(const std::vector<BarrierFn>& parts) {
    require(!parts.empty(), "compose_sum: empty part list");
    const int dim = parts.front().dim;
    for (const auto& p : parts)
        require(p.dim == dim, "compose_sum: parts must share state dimension");
    BarrierFn b;
    b.dim = dim;
    b.value = [parts](const Vector& x) {
        double v = 0.0;
        for (const auto& p : parts) v += p.value(x);
        return v;
    };
    b.gradient = [parts, dim](const Vector& x) {
        Vector g = Vector::Zero(dim);
        for (const auto& p : parts) g += p.gradient(x);
        return g;
    };
    b.contains = [parts](const Vector& x) {
        for (const auto& p : parts)
            if (!p.contains(x)) return false;
        return true;
    };
    return b;
}

BarrierFn make_minefield(double field_scale, const std::vector<Vector>& centers,
                         double radius) {
    std::vector<BarrierFn> parts;
    parts.reserve(centers.size() + 1);
    parts.push_back(make_quartic_ratio(2, field_scale));
    for (const auto& c : centers) parts.push_back(make_inverse_obstacle(c, radius));
    return compose_sum(parts);
}

std::vector<Vector> default_mine_layout(int count, std::uint64_t seed) {
    std::vector<Vector> starts;
    {
        Vector a(2), b(2), c(2);
        a << 4.0, 6.0;
        b << -7.5, 4.5;
        c << 1.0, -9.2;
        starts = {a, b, c};
    }
    const double clearance = 2.5;
    Rng rng(seed);
    std::vector<Vector> centers;
    while (static_cast<int>(centers.size()) < count) {
        Vector cand = rng.uniform_in_box(Box::centered(2, 8.0));
        if (cand.norm() > 8.0) continue;
        if (cand.norm() < clearance) continue;
        bool clear = true;
        for (const auto& s : starts)
            if ((cand - s).norm() < clearance) clear = false;
        for (const auto& c : centers)
            if ((cand - c).norm() < clearance) clear = false;
        if (clear) centers.push_back(cand);
    }
    return centers;
}

double estimate_gamma(const BarrierFn& b, int samples, const Box& box, std::uint64_t seed) {
    require(samples > 0, "estimate_gamma: samples must be positive");
    require(box.dim() == b.dim, "estimate_gamma: box dimension mismatch");
    Rng rng(seed);
    double best = 0.0;
    int used = 0;
    long draws = 0;
    const long max_draws = 1000L * samples;
    while (used < samples && draws < max_draws) {
        ++draws;
        Vector x = rng.uniform_in_box(box);
        if (!b.contains(x)) continue;
        ++used;
        const double gn = b.gradient(x).norm();
        if (gn < 1e-12) continue;
        best = std::max(best, b.value(x) / gn);
    }
    if (used == 0 || best == 0.0)
        throw SamplingError("estimate_gamma: no interior sample with usable gradient");
    return best;
}

}  // namespace acil
