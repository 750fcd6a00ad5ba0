#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "../common/properties.hpp"
#include "ovstokes/errors.hpp"

using namespace ovs;

TEST_CASE("velocity vanishes on the boundary of the unit square")
{
    auto ex = manufactured("ms-stokes-2021");
    for (int s = 0; s <= 20; ++s) {
        double t = s / 20.0;
        for (Vec2 x : {Vec2(t, 0), Vec2(t, 1), Vec2(0, t), Vec2(1, t)}) CHECK(ex->u(x).norm() < 1e-15);
        CHECK(std::abs(ex->u(Vec2(t, 0.5)).x()) < 1e-15);
    }
}

TEST_CASE("divergence free") { CHECK(props::fd_divergence(*manufactured("ms-stokes-2021")) <= 1e-6); }

TEST_CASE("derivatives agree with finite differences")
{
    auto ex = manufactured("ms-stokes-2021");
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> U(0.05, 0.95);
    const double d = 1e-4;
    for (int s = 0; s < 200; ++s) {
        Vec2 x(U(rng), U(rng));
        Mat2 g = ex->grad_u(x);
        Vec2 gx = (ex->u(x + Vec2(d, 0)) - ex->u(x - Vec2(d, 0))) / (2 * d);
        Vec2 gy = (ex->u(x + Vec2(0, d)) - ex->u(x - Vec2(0, d))) / (2 * d);
        CHECK((g.col(0) - gx).norm() < 1e-6);
        CHECK((g.col(1) - gy).norm() < 1e-6);
        // f = -Laplace u + grad p by second differences
        Vec2 lap = (ex->u(x + Vec2(d, 0)) + ex->u(x - Vec2(d, 0)) + ex->u(x + Vec2(0, d)) + ex->u(x - Vec2(0, d)) -
                    4.0 * ex->u(x)) /
                   (d * d);
        Vec2 gp((ex->p(x + Vec2(d, 0)) - ex->p(x - Vec2(d, 0))) / (2 * d),
                (ex->p(x + Vec2(0, d)) - ex->p(x - Vec2(0, d))) / (2 * d));
        CHECK((ex->f(x) - (-lap + gp)).norm() < 1e-3 * std::max(1.0, ex->f(x).norm()));
    }
}

TEST_CASE("traction")
{
    auto ex = manufactured("linear-patch");
    Vec2 n(0.6, 0.8), x(0.2, 0.7);
    Vec2 t = ex->traction(x, n);
    CHECK((t - Vec2(n.y() - x.x() * n.x(), n.x() - x.x() * n.y())).norm() < 1e-15);
}

TEST_CASE("registry")
{
    CHECK(manufactured_names().size() == 2);
    CHECK_THROWS_AS(manufactured("nope"), ConfigurationError);
    auto s = scaled(manufactured("linear-patch"), 2.0);
    CHECK(s->p(Vec2(0.25, 0.0)) == doctest::Approx(0.5));
}
