#pragma once

// property checks shared by the unit tests and the acceptance binary;
// each returns the worst observed deviation

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ovstokes/assembly.hpp"
#include "ovstokes/case.hpp"
#include "ovstokes/manufactured.hpp"
#include "ovstokes/solve.hpp"
#include "ovstokes/splines.hpp"
#include "ovstokes/stabilization.hpp"

namespace ovs::props {

inline std::vector<KnotVector> sample_knot_vectors()
{
    return {
        KnotVector(2, {0, 0, 0, 0.5, 1, 1, 1}),
        KnotVector(3, {0, 0, 0, 0, 0.2, 0.2, 0.55, 0.9, 1, 1, 1, 1}),
        KnotVector(1, {0, 0, 0.3, 0.7, 1, 1}),
        KnotVector::uniform(4, 7, 3),
        KnotVector::uniform(3, 5, 0),
        KnotVector(2, {0, 0, 0, 0.1, 0.1, 0.6, 1, 1, 1}),
    };
}

inline double partition_of_unity(int samples = 500)
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (const auto& kv : sample_knot_vectors())
        for (int s = 0; s < samples; ++s) {
            double x = s == 0 ? 0.0 : s == 1 ? 1.0 : U(rng);
            worst = std::max(worst, std::abs(eval_basis(kv, x).sum() - 1.0));
        }
    return worst;
}

// a curved degree-2 map with uneven knots in both directions, plus the trapezoid of the two-patch case
inline std::vector<GeometryMap> sample_maps()
{
    std::vector<GeometryMap> maps;
    KnotVector ku(2, {0, 0, 0, 0.3, 1, 1, 1}), kv(2, {0, 0, 0, 0.6, 0.8, 1, 1, 1});
    TensorSplineSpace sp(ku, kv);
    std::vector<Vec2> ctrl;
    for (int j = 0; j < sp.nv(); ++j)
        for (int i = 0; i < sp.nu(); ++i) {
            double u = double(i) / (sp.nu() - 1), v = double(j) / (sp.nv() - 1);
            ctrl.emplace_back(u + 0.05 * std::sin(3.0 * v), v + 0.04 * std::cos(2.0 * u));
        }
    maps.emplace_back(sp, ctrl);
    maps.push_back(geometry_of(gen_two_patch(1e-6).patches[1]));
    return maps;
}

// values and first derivatives after one and two dyadic refinements
inline double knot_insertion(int samples = 100)
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (const auto& m : sample_maps()) {
        GeometryMap r1 = dyadic_refine(m), r2 = dyadic_refine(r1);
        for (int s = 0; s < samples; ++s) {
            Vec2 xi(U(rng), U(rng));
            GeoEval a = m.eval_raw(xi);
            for (const GeometryMap* r : {&r1, &r2}) {
                GeoEval b = r->eval_raw(xi);
                worst = std::max(worst, (a.x - b.x).cwiseAbs().maxCoeff());
                worst = std::max(worst, (a.jac - b.jac).cwiseAbs().maxCoeff());
            }
        }
    }
    return worst;
}

// |sum of visible areas - union area| / union area
inline double visible_area(const PatchHierarchy& h)
{
    return std::abs(h.visible_area() - h.union_area()) / h.union_area();
}

// R^p / R^v applied to a donor field equal to a monomial of Q_deg in the frame of K';
// relative error on K. Only affine donors contain those monomials.
struct Reproduction {
    double error = 0.0;
    int operators = 0;
    int skipped = 0; // non-affine donors
};

inline Reproduction polynomial_reproduction(const PatchHierarchy& h, const StabOperators& stab)
{
    Reproduction out;
    for (int p = 0; p < h.num_patches(); ++p)
        for (int e = 0; e < static_cast<int>(h.patch(p).elements.size()); ++e)
            for (Field f : {Field::pressure, Field::velocity}) {
                const LocalProjection* op = f == Field::pressure ? stab.pressure(p, e) : stab.velocity(p, e);
                if (!op) continue;
                const auto& donor = h.patch(op->patch);
                if (!donor.geo.is_affine()) {
                    ++out.skipped;
                    continue;
                }
                ++out.operators;
                const int deg = op->frame.degree;
                auto fit_pts = h.full_element_quadrature(op->patch, op->elem, deg + 2);
                auto test_pts = h.full_element_quadrature(p, e, deg + 1);
                std::vector<Vec2> fxi;
                for (const auto& q : fit_pts) fxi.push_back(q.xi);
                PointBasis nb = native_basis(h, op->patch, op->elem, f, fxi);
                for (int b = 0; b <= deg; ++b)
                    for (int a = 0; a <= deg; ++a) {
                        auto mono = [&](const Vec2& x) {
                            Vec2 X = op->frame.local(x);
                            return std::pow(X.x(), a) * std::pow(X.y(), b);
                        };
                        Eigen::VectorXd rhs(fit_pts.size());
                        for (std::size_t q = 0; q < fit_pts.size(); ++q) rhs[q] = mono(fit_pts[q].x);
                        Eigen::VectorXd c = nb.val.colPivHouseholderQr().solve(rhs);
                        Eigen::VectorXd coef = op->P * c;
                        double scale = 0.0, err = 0.0;
                        for (const auto& q : test_pts) {
                            double m = mono(q.x);
                            scale = std::max(scale, std::abs(m));
                            err = std::max(err, std::abs(op->frame.eval(q.x).dot(coef) - m));
                        }
                        out.error = std::max(out.error, err / std::max(scale, 1.0));
                    }
            }
    return out;
}

inline DiscreteField random_field(const PatchHierarchy& h, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    DiscreteField f = DiscreteField::zeros(h);
    for (int p = 0; p < h.num_patches(); ++p) {
        for (auto* v : {&f.ux[p], &f.uy[p], &f.p[p]})
            for (int a = 0; a < v->size(); ++a) (*v)[a] = U(rng);
    }
    return f;
}

// sample points of every element that carries an operator, with the owning segment for fluxes
struct OperatorSite {
    int p, e;
    std::vector<Vec2> xs;
};

inline std::vector<OperatorSite> pressure_sites(const PatchHierarchy& h, const StabOperators& stab)
{
    std::vector<OperatorSite> out;
    for (int p = 0; p < h.num_patches(); ++p)
        for (int e = 0; e < static_cast<int>(h.patch(p).elements.size()); ++e) {
            if (!stab.pressure(p, e)) continue;
            OperatorSite s{p, e, {}};
            for (const auto& q : h.full_element_quadrature(p, e, 2)) s.xs.push_back(q.x);
            out.push_back(s);
        }
    return out;
}

// superposition error of the stabilized pressure and fluxes on random pairs
inline double linearity(const PatchHierarchy& h, const StabOperators& stab)
{
    DiscreteField f = random_field(h, 1), g = random_field(h, 2), c = DiscreteField::zeros(h);
    const double a = 0.7, b = -1.3;
    for (int p = 0; p < h.num_patches(); ++p) {
        c.ux[p] = a * f.ux[p] + b * g.ux[p];
        c.uy[p] = a * f.uy[p] + b * g.uy[p];
        c.p[p] = a * f.p[p] + b * g.p[p];
    }
    double worst = 0.0;
    for (const auto& s : pressure_sites(h, stab))
        for (const auto& x : s.xs) {
            double vf = eval_stab_pressure(h, &stab, f, s.p, s.e, x), vg = eval_stab_pressure(h, &stab, g, s.p, s.e, x);
            double vc = eval_stab_pressure(h, &stab, c, s.p, s.e, x);
            worst = std::max(worst, std::abs(vc - a * vf - b * vg) / std::max(1.0, std::abs(vc)));
        }
    for (const auto& seg : h.interfaces()) {
        for (const auto& q : h.segment_quadrature(seg, 2)) {
            Vec2 vf = averaged_flux(h, &stab, f, seg, 0.5, q.x), vg = averaged_flux(h, &stab, g, seg, 0.5, q.x);
            Vec2 vc = averaged_flux(h, &stab, c, seg, 0.5, q.x);
            worst = std::max(worst, (vc - a * vf - b * vg).norm() / std::max(1.0, vc.norm()));
        }
    }
    return worst;
}

// largest change of a stabilized value on K when every non-donor coefficient is perturbed
inline double locality(const PatchHierarchy& h, const StabOperators& stab)
{
    DiscreteField f = random_field(h, 3);
    double worst = 0.0;
    for (const auto& s : pressure_sites(h, stab)) {
        const LocalProjection* op = stab.pressure(s.p, s.e);
        DiscreteField g = random_field(h, 4);
        for (int p = 0; p < h.num_patches(); ++p) {
            g.ux[p] = f.ux[p];
            g.uy[p] = f.uy[p];
        }
        for (int a : op->dofs) g.p[op->patch][a] = f.p[op->patch][a];
        for (const auto& x : s.xs)
            worst = std::max(worst, std::abs(eval_stab_pressure(h, &stab, f, s.p, s.e, x) -
                                              eval_stab_pressure(h, &stab, g, s.p, s.e, x)));
    }
    for (const auto& seg : h.interfaces())
        for (int side = 0; side < 2; ++side) {
            const int p = side == 0 ? seg.i : seg.j, e = side == 0 ? seg.elem_i : seg.elem_j;
            const LocalProjection* op = stab.velocity(p, e);
            if (!op) continue;
            DiscreteField g = random_field(h, 5);
            for (int q = 0; q < h.num_patches(); ++q) g.p[q] = f.p[q];
            for (int a : op->dofs) {
                g.ux[op->patch][a] = f.ux[op->patch][a];
                g.uy[op->patch][a] = f.uy[op->patch][a];
            }
            for (const auto& q : h.segment_quadrature(seg, 2))
                worst = std::max(worst, (eval_stab_velocity_flux(h, &stab, f, seg, side, q.x) -
                                         eval_stab_velocity_flux(h, &stab, g, seg, side, q.x))
                                            .norm());
        }
    return worst;
}

inline double max_abs(const Eigen::SparseMatrix<double>& M)
{
    double m = 0.0;
    for (int c = 0; c < M.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(M, c); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

inline double symmetry(const Eigen::SparseMatrix<double>& M)
{
    Eigen::SparseMatrix<double> D = M - Eigen::SparseMatrix<double>(M.transpose());
    return max_abs(D) / max_abs(M);
}

// reduced systems with stabilization on and off when theta is below every visible fraction
struct NoBadIdentity {
    double matrix = 0.0, rhs = 0.0;
    int bad = 0;
    bool same_size = false;
};

inline NoBadIdentity stabilized_equals_plain(CaseConfig c)
{
    PatchHierarchy probe = build_hierarchy(c, 0);
    c.theta = std::min(c.theta, 0.5 * probe.min_active_rho());
    PatchHierarchy h = build_hierarchy(c, 0);
    auto ex = manufactured(c.manufactured);
    NoBadIdentity out;
    out.bad = h.num_bad();
    AssemblyConfig cfg = assembly_config(c);
    cfg.stabilize = true;
    StabOperators s_on(h, {true, cfg.project_visible});
    StokesSystem on = assemble_system(h, *ex, cfg, &s_on);
    cfg.stabilize = false;
    StabOperators s_off(h, {false, cfg.project_visible});
    StokesSystem off = assemble_system(h, *ex, cfg, &s_off);
    out.same_size = on.matrix.rows() == off.matrix.rows();
    if (!out.same_size) return out;
    out.matrix = max_abs(Eigen::SparseMatrix<double>(on.matrix - off.matrix)) / max_abs(off.matrix);
    out.rhs = (on.rhs - off.rhs).cwiseAbs().maxCoeff() / off.rhs.cwiseAbs().maxCoeff();
    return out;
}

// central-difference divergence of the manufactured velocity
inline double fd_divergence(const ExactSolution& ex, int samples = 1000)
{
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double d = 1e-5;
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Vec2 x(U(rng), U(rng));
        double du = (ex.u(x + Vec2(d, 0)).x() - ex.u(x - Vec2(d, 0)).x()) / (2 * d);
        double dv = (ex.u(x + Vec2(0, d)).y() - ex.u(x - Vec2(0, d)).y()) / (2 * d);
        worst = std::max(worst, std::abs(du + dv));
    }
    return worst;
}

} // namespace ovs::props
