#include <doctest.h>

#include <cmath>

#include "acil/barrier.hpp"
#include "test_util.hpp"

using namespace acil;
using acil::testutil::fd_gradient;

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

/// Gradient consistency over interior rejection samples.
void check_gradient(const BarrierFn& b, const Box& box, int points, std::uint64_t seed) {
    Rng rng(seed);
    int used = 0;
    while (used < points) {
        const Vector x = rng.uniform_in_box(box);
        if (!b.contains(x)) continue;
        // keep away from the boundary where finite differences degrade
        if (!b.contains(1.02 * x)) continue;
        ++used;
        const Vector g = b.gradient(x);
        const Vector fd = fd_gradient(b.value, x);
        CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, g.norm()));
    }
}

}  // namespace

TEST_CASE("ball_log basics") {
    const BarrierFn b = make_ball_log(2, 2.0);
    CHECK(b.value(vec2(0, 0)) == 0.0);
    CHECK(b.gamma.value() == doctest::Approx(1.0));
    CHECK(b.contains(vec2(1.9, 0)));
    CHECK(!b.contains(vec2(2.0, 0)));
    check_gradient(b, Box::centered(2, 2.0), 1000, 11);
}

TEST_CASE("box_log basics") {
    const BarrierFn b = make_box_log(vec2(1.0, 1.0));
    CHECK(b.value(vec2(0, 0)) == 0.0);
    CHECK(b.gamma.value() == doctest::Approx(0.5));
    CHECK(b.contains(vec2(0.99, -0.99)));
    CHECK(!b.contains(vec2(1.0, 0)));
    check_gradient(b, Box::centered(2, 1.0), 1000, 12);
}

TEST_CASE("quartic_ratio value and gradient") {
    const BarrierFn b = make_quartic_ratio(2, 2.0);
    CHECK(b.value(vec2(0, 0)) == 0.0);
    CHECK(b.value(vec2(1.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));  // x'x = 2
    check_gradient(b, Box::centered(2, 2.0), 1000, 13);

    const BarrierFn field = make_quartic_ratio(2, 10.0);  // minefield outer barrier
    check_gradient(field, Box::centered(2, 10.0), 1000, 14);
}

TEST_CASE("inverse_obstacle") {
    const BarrierFn b = make_inverse_obstacle(vec2(2, 0), 1.0);
    CHECK(b.contains(vec2(0, 0)));
    CHECK(!b.contains(vec2(2.5, 0)));
    CHECK(b.value(vec2(0, 0)) == doctest::Approx(1.0 / 3.0));
    Rng rng(15);
    int used = 0;
    while (used < 1000) {
        const Vector x = rng.uniform_in_box(Box::centered(2, 6.0));
        if ((x - vec2(2, 0)).norm() < 1.1) continue;
        ++used;
        CHECK((b.gradient(x) - fd_gradient(b.value, x)).norm() <=
              1e-5 * std::max(1.0, b.gradient(x).norm()));
    }
}

TEST_CASE("positivity away from the origin for Table-style barriers") {
    Rng rng(16);
    for (const BarrierFn& b :
         {make_ball_log(2, 2.0), make_box_log(vec2(1, 1)), make_quartic_ratio(2, 2.0)}) {
        for (int i = 0; i < 500; ++i) {
            const Vector x = rng.uniform_in_box(Box::centered(2, 0.9));
            if (!b.contains(x) || x.norm() < 1e-6) continue;
            CHECK(b.value(x) > 0.0);
        }
    }
}

TEST_CASE("divergence toward the boundary") {
    // Polynomial-rate barriers clear 1e3 within 1e-3*scale of the boundary.
    const BarrierFn q = make_quartic_ratio(2, 2.0);
    CHECK(q.value(vec2(2.0 * (1 - 1e-3), 0)) > 1e3);
    const BarrierFn o = make_inverse_obstacle(vec2(0, 0), 1.0);
    CHECK(o.value(vec2(1.0 + 1e-4, 0)) > 1e3);

    // Log barriers diverge too slowly for that threshold in double precision;
    // assert strict growth and a large value essentially at the boundary.
    const BarrierFn ball = make_ball_log(2, 2.0);
    double prev = 0.0;
    for (double f : {0.9, 0.99, 0.999, 0.9999}) {
        const double v = ball.value(vec2(2.0 * f, 0));
        CHECK(v > prev);
        prev = v;
    }
    CHECK(ball.value(vec2(2.0 * (1 - 1e-12), 0)) > 20.0);
}

TEST_CASE("monotone along rays from the origin") {
    Rng rng(17);
    for (const BarrierFn& b : {make_ball_log(2, 2.0), make_quartic_ratio(2, 2.0)}) {
        for (int ray = 0; ray < 50; ++ray) {
            const double ang = rng.uniform(0, 2 * M_PI);
            const Vector dir = vec2(std::cos(ang), std::sin(ang));
            double prev = -1.0;
            for (double r = 0.05; r < 1.99; r += 0.05) {
                const double v = b.value(r * dir);
                CHECK(v > prev);
                prev = v;
            }
        }
    }
}

TEST_CASE("gamma bound holds where gamma is set") {
    Rng rng(18);
    for (const BarrierFn& b : {make_ball_log(2, 2.0), make_box_log(vec2(1, 1))}) {
        int used = 0;
        while (used < 2000) {
            const Vector x = rng.uniform_in_box(Box::centered(2, 2.0));
            if (!b.contains(x)) continue;
            ++used;
            CHECK(b.gamma.value() * b.gradient(x).norm() >= b.value(x) - 1e-12);
        }
    }
}

TEST_CASE("compose_sum") {
    const BarrierFn part = make_quartic_ratio(2, 10.0);
    const BarrierFn single = compose_sum({part});
    Rng rng(19);
    for (int i = 0; i < 100; ++i) {
        const Vector x = rng.uniform_in_box(Box::centered(2, 9.0));
        if (!part.contains(x)) continue;
        CHECK(single.value(x) == part.value(x));
        CHECK((single.gradient(x) - part.gradient(x)).norm() == 0.0);
    }

    const auto centers = default_mine_layout();
    const BarrierFn field = make_minefield(10.0, centers);
    // value at the origin is the direct sum over the obstacles
    double expect = 0.0;
    for (const auto& c : centers) expect += 1.0 / (c.squaredNorm() - 1.0);
    CHECK(field.value(Vector::Zero(2)) == doctest::Approx(expect).epsilon(1e-14));

    // gradient of the sum is the sum of gradients
    std::vector<BarrierFn> parts;
    parts.push_back(make_quartic_ratio(2, 10.0));
    for (const auto& c : centers) parts.push_back(make_inverse_obstacle(c, 1.0));
    int used = 0;
    while (used < 100) {
        const Vector x = rng.uniform_in_box(Box::centered(2, 9.0));
        if (!field.contains(x)) continue;
        ++used;
        Vector sum = Vector::Zero(2);
        for (const auto& p : parts) sum += p.gradient(x);
        CHECK((field.gradient(x) - sum).norm() <= 1e-12 * std::max(1.0, sum.norm()));
    }

    CHECK_THROWS_AS(compose_sum({}), std::invalid_argument);
}

TEST_CASE("default mine layout invariants") {
    const auto centers = default_mine_layout();
    REQUIRE(centers.size() == 12);
    std::vector<Vector> starts = {vec2(4, 6), vec2(-7.5, 4.5), vec2(1, -9.2)};
    for (size_t i = 0; i < centers.size(); ++i) {
        CHECK(centers[i].norm() <= 8.0);
        CHECK(centers[i].norm() >= 2.5);
        for (const auto& s : starts) CHECK((centers[i] - s).norm() >= 2.5);
        for (size_t j = i + 1; j < centers.size(); ++j)
            CHECK((centers[i] - centers[j]).norm() >= 2.5);
    }
}

TEST_CASE("estimate_gamma") {
    CHECK(estimate_gamma(make_ball_log(2, 2.0), 10000, Box::centered(2, 2.0)) <= 1.05);
    CHECK(estimate_gamma(make_box_log(vec2(1, 1)), 10000, Box::centered(2, 1.0)) <= 0.525);

    // sampling only near the origin yields a small positive value
    const double near = estimate_gamma(make_ball_log(2, 2.0), 1000, Box::centered(2, 0.05));
    CHECK(near > 0.0);
    CHECK(near < 0.05);

    // no usable samples: a box entirely inside an obstacle
    Box inside;
    inside.lo = vec2(1.8, -0.1);
    inside.hi = vec2(2.2, 0.1);
    CHECK_THROWS_AS(estimate_gamma(make_inverse_obstacle(vec2(2, 0), 1.0), 100, inside),
                    SamplingError);
}

TEST_CASE("constructor parameter validation") {
    CHECK_THROWS_AS(make_ball_log(2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_quartic_ratio(2, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_box_log(vec2(1, -1)), std::invalid_argument);
    CHECK_THROWS_AS(make_inverse_obstacle(vec2(0, 0), 0.0), std::invalid_argument);
}
