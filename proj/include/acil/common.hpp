#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace acil {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned box used for rejection sampling and grid probes.
struct Box {
    Vector lo;
    Vector hi;

    static Box centered(int dim, double halfwidth) {
        Box b;
        b.lo = Vector::Constant(dim, -halfwidth);
        b.hi = Vector::Constant(dim, halfwidth);
        return b;
    }
    int dim() const { return static_cast<int>(lo.size()); }
};

/// Deterministic RNG wrapper. The raw mt19937_64 stream is pinned by the
/// standard; the double mapping below avoids std::uniform_real_distribution,
/// whose output is implementation-defined, so sampled sequences are
/// bit-identical across compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    Vector uniform_in_box(const Box& box) {
        Vector x(box.dim());
        for (int i = 0; i < box.dim(); ++i) x[i] = uniform(box.lo[i], box.hi[i]);
        return x;
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FeasibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace acil
