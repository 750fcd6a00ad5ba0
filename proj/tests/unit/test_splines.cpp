#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "../common/properties.hpp"
#include "ovstokes/errors.hpp"
#include "ovstokes/splines.hpp"

using namespace ovs;

namespace {
const KnotVector kv2(2, {0, 0, 0, 0.5, 1, 1, 1});
}

TEST_CASE("find_span closure convention")
{
    CHECK(kv2.knots()[find_span(kv2, 0.6)] == 0.5);
    CHECK(find_span(kv2, 0.0) == 2);
    CHECK(find_span(kv2, 1.0) == 3);
    CHECK_THROWS_AS(find_span(kv2, 1.5), DomainError);
    CHECK_THROWS_AS(find_span(kv2, -0.1), DomainError);
}

TEST_CASE("knot vector validation")
{
    CHECK_THROWS_AS(KnotVector(2, {0, 0, 1, 1}), GeometryError);
    CHECK_THROWS_AS(KnotVector(2, {0, 0, 0, 0.7, 0.5, 1, 1, 1}), GeometryError);
    CHECK_THROWS_AS(KnotVector(2, {0, 0, 0.2, 0.5, 1, 1, 1}), GeometryError);
    KnotVector rep(2, {0, 0, 0, 0.5, 0.5, 1, 1, 1});
    CHECK(rep.num_elements() == 2);
    CHECK(rep.regularity() == 0);
}

TEST_CASE("eval_basis values")
{
    Eigen::VectorXd v = eval_basis(kv2, 0.0);
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == 0.0);
    CHECK(v[2] == 0.0);
    const double x = 0.25;
    Eigen::VectorXd w = eval_basis(kv2, x);
    int span = find_span(kv2, x);
    for (int a = 0; a <= 2; ++a) CHECK(std::abs(w[a] - cox_de_boor(kv2, span - 2 + a, 2, x)) < 1e-14);
}

TEST_CASE("per-span evaluation matches the recursive oracle everywhere")
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (const auto& kv : props::sample_knot_vectors())
        for (int s = 0; s < 200; ++s) {
            double x = U(rng);
            Eigen::VectorXd v = eval_basis(kv, x);
            int span = find_span(kv, x), k = kv.degree();
            for (int i = 0; i < kv.num_basis(); ++i) {
                double ref = cox_de_boor(kv, i, k, x);
                double got = (i >= span - k && i <= span) ? v[i - span + k] : 0.0;
                CHECK(std::abs(got - ref) < 1e-13);
                // local support
                if (x < kv.knots()[i] || x >= kv.knots()[i + k + 1]) CHECK(ref == 0.0);
                CHECK(ref >= 0.0);
            }
        }
}

TEST_CASE("partition of unity") { CHECK(props::partition_of_unity() <= 1e-12); }

TEST_CASE("derivatives")
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(0.01, 0.99);
    for (const auto& kv : props::sample_knot_vectors()) {
        for (int s = 0; s < 100; ++s) {
            double x = U(rng);
            Eigen::MatrixXd d = eval_basis_ders(kv, x, 1);
            CHECK(std::abs(d.row(1).sum()) < 1e-10);
            const double hstep = 1e-6;
            int span = find_span(kv, x);
            if (find_span(kv, x - hstep) != span || find_span(kv, x + hstep) != span) continue;
            Eigen::VectorXd fd = (eval_basis(kv, x + hstep) - eval_basis(kv, x - hstep)) / (2 * hstep);
            CHECK((fd - d.row(1).transpose()).cwiseAbs().maxCoeff() < 1e-6);
        }
        CHECK_THROWS_AS(eval_basis_ders(kv, 0.5, kv.degree() + 1), DegreeError);
    }
}

TEST_CASE("support extension matches brute force")
{
    TensorSplineSpace sp(KnotVector::uniform(2, 8, 1), KnotVector::uniform(2, 8, 1));
    int interior = sp.element_index(4, 4);
    CHECK(sp.support_extension(interior).size() == 25);
    CHECK(sp.support_extension(sp.element_index(0, 0)).size() == 9);
    for (int e = 0; e < sp.num_elements(); ++e) {
        std::set<int> brute;
        for (int a : sp.active_basis(e)) {
            auto s = sp.basis_support(a);
            for (int ey = s[2]; ey <= s[3]; ++ey)
                for (int ex = s[0]; ex <= s[1]; ++ex) brute.insert(sp.element_index(ex, ey));
        }
        auto ext = sp.support_extension(e);
        CHECK(std::set<int>(ext.begin(), ext.end()) == brute);
    }
}

TEST_CASE("dyadic refinement")
{
    KnotVector k(2, {0, 0, 0, 1, 1, 1});
    CHECK(dyadic_refine(k).knots() == std::vector<double>{0, 0, 0, 0.5, 1, 1, 1});
    CHECK(props::knot_insertion() <= 1e-12);
}

TEST_CASE("coefficient transfer matches a least-squares refit")
{
    KnotVector kv(3, {0, 0, 0, 0, 0.3, 0.7, 1, 1, 1, 1});
    KnotVector fine = dyadic_refine(kv);
    Eigen::MatrixXd c(kv.num_basis(), 1);
    for (int i = 0; i < c.rows(); ++i) c(i, 0) = std::sin(1.0 + i);
    Eigen::MatrixXd cf = refine_coefficients(kv, c, fine);
    const int m = 200;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, fine.num_basis());
    Eigen::VectorXd y(m);
    for (int s = 0; s < m; ++s) {
        double x = (s + 0.5) / m;
        Eigen::VectorXd b = eval_basis(fine, x), bc = eval_basis(kv, x);
        int sf = find_span(fine, x), sc = find_span(kv, x);
        for (int a = 0; a <= 3; ++a) A(s, sf - 3 + a) = b[a];
        y[s] = 0.0;
        for (int a = 0; a <= 3; ++a) y[s] += bc[a] * c(sc - 3 + a, 0);
    }
    Eigen::VectorXd ls = A.colPivHouseholderQr().solve(y);
    CHECK((ls - cf.col(0)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("tensor basis factorizes")
{
    TensorSplineSpace sp(KnotVector::uniform(3, 4, 2), KnotVector::uniform(3, 3, 2));
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int s = 0; s < 50; ++s) {
        Vec2 xi(U(rng), U(rng));
        int e = sp.find_element(xi);
        TensorBasis tb = sp.eval(e, xi);
        Eigen::VectorXd bu = eval_basis(sp.knots_u(), xi.x()), bv = eval_basis(sp.knots_v(), xi.y());
        for (int jj = 0; jj <= 3; ++jj)
            for (int ii = 0; ii <= 3; ++ii) CHECK(std::abs(tb.val[jj * 4 + ii] - bu[ii] * bv[jj]) < 1e-14);
    }
}

TEST_CASE("geometry maps")
{
    GeometryMap id = GeometryMap::bilinear({0, 0}, {1, 0}, {0, 1}, {1, 1});
    GeoEval g = eval_geometry(id, {0.3, 0.8});
    CHECK((g.jac - Mat2::Identity()).norm() < 1e-14);
    CHECK(g.det == doctest::Approx(1.0));

    Mat2 A;
    A << 2.0, 0.5, -0.3, 1.5;
    GeometryMap aff = GeometryMap::affine(A, {0.1, 0.2});
    CHECK(aff.is_affine());
    CHECK((eval_geometry(aff, {0.7, 0.1}).jac - A).norm() < 1e-13);

    GeometryMap trap = geometry_of(gen_two_patch(1e-4).patches[1]);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> U(0.05, 0.95);
    for (int s = 0; s < 50; ++s) {
        Vec2 xi(U(rng), U(rng));
        const double d = 1e-6;
        GeoEval e = eval_geometry(trap, xi);
        Vec2 du = (trap.eval_raw(xi + Vec2(d, 0)).x - trap.eval_raw(xi - Vec2(d, 0)).x) / (2 * d);
        Vec2 dv = (trap.eval_raw(xi + Vec2(0, d)).x - trap.eval_raw(xi - Vec2(0, d)).x) / (2 * d);
        CHECK((e.jac.col(0) - du).norm() < 1e-6);
        CHECK((e.jac.col(1) - dv).norm() < 1e-6);
        Vec2 back;
        CHECK(trap.inverse(e.x, {0.5, 0.5}, back));
        CHECK((back - xi).norm() < 1e-12);
    }

    GeometryMap flipped = GeometryMap::bilinear({0, 0}, {0, 1}, {1, 0}, {1, 1});
    CHECK_THROWS_AS(eval_geometry(flipped, {0.5, 0.5}), SingularGeometryError);
    CHECK_THROWS_AS(eval_geometry(id, {1.5, 0.5}), DomainError);
}

TEST_CASE("Taylor-Hood pair")
{
    TaylorHoodPair th = TaylorHoodPair::make({0, 0.25, 0.5, 0.75, 1}, {0, 0.5, 1}, 2, 1);
    CHECK(th.velocity.degree() == 3);
    CHECK(th.pressure.degree() == 2);
    CHECK(th.velocity.nex() == th.pressure.nex());
    CHECK(th.pressure.num_basis() == 6 * 4);
    // same regularity in both spaces: velocity knots have multiplicity 2
    CHECK(th.velocity.num_basis() == 10 * 6);
    CHECK_THROWS_AS(TaylorHoodPair::make({0, 1}, {0, 1}, 2, 2), GeometryError);
}
