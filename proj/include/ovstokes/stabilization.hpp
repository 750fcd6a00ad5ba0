#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ovstokes/union_geometry.hpp"

namespace ovs {

enum class Field { velocity, pressure };

// affine physical frame x = center + A X of a donor cell, A the geometry Jacobian at the
// cell centre scaled to the parametric half-widths; tensor Legendre basis of Q_deg in X
struct ExtrapolationFrame {
    Vec2 center = Vec2::Zero();
    Mat2 A = Mat2::Identity();
    Mat2 A_inv = Mat2::Identity();
    int degree = 0;

    static ExtrapolationFrame on_element(const GeometryMap& geo, const ElementBox& box, int degree);
    int size() const { return (degree + 1) * (degree + 1); }
    Vec2 local(const Vec2& x) const { return A_inv * (x - center); }
    Eigen::VectorXd eval(const Vec2& x) const;
    // rows: value, d/dx, d/dy
    Eigen::Matrix<double, 3, Eigen::Dynamic> eval_grad(const Vec2& x) const;
};

struct LocalProjection {
    int patch = -1, elem = -1; // donor K'
    ExtrapolationFrame frame;
    std::vector<int> dofs; // donor basis functions active on K'
    Eigen::MatrixXd P;     // frame coefficients = P * donor coefficients
    double mass_condition = 1.0;
};

// L2 projection over K' (or over its visible part) onto Q_deg in the frame of K'
LocalProjection build_local_projection(const PatchHierarchy& h, int patch, int elem, Field field, bool visible_only = false);

struct StabOptions {
    bool enabled = true;
    bool project_visible = false; // integrate the projection over K' cap Omega instead of K'
};

class StabOperators {
public:
    StabOperators(const PatchHierarchy& h, StabOptions opt = {});

    const StabOptions& options() const { return opt_; }
    // R^p on element e of patch p; null when e uses its native pressure
    const LocalProjection* pressure(int p, int e) const;
    // R^v on element e of patch p; null when e uses its native velocity in fluxes
    const LocalProjection* velocity(int p, int e) const;
    int num_pressure_ops() const;
    int num_velocity_ops() const;

private:
    StabOptions opt_;
    std::vector<std::vector<int>> pmap_, vmap_;
    std::vector<LocalProjection> pops_, vops_;
};

// scalar field values/gradients at points, as linear functionals of patch-local coefficients
struct PointBasis {
    int patch = -1;
    std::vector<int> dofs;      // basis indices in the scalar space of the patch
    Eigen::MatrixXd val, gx, gy; // rows = points, cols = dofs
};

PointBasis native_basis(const PatchHierarchy& h, int patch, int elem, Field field, const std::vector<Vec2>& xis);
// native basis on good elements, donor extension on elements that carry an operator
PointBasis stab_basis(const PatchHierarchy& h, const StabOperators* stab, int patch, int elem, Field field,
                      const std::vector<Vec2>& xis, const std::vector<Vec2>& xs);

// per-patch coefficient vectors over all basis functions of each patch
struct DiscreteField {
    std::vector<Eigen::VectorXd> ux, uy, p;
    static DiscreteField zeros(const PatchHierarchy& h);
};

// pressure of the stabilized space at x in element e of patch p
double eval_stab_pressure(const PatchHierarchy& h, const StabOperators* stab, const DiscreteField& f, int p, int e,
                          const Vec2& x);
// D R^v(v) n on one side of a segment, n the outward normal of that side (n_i for side 0, -n_i for side 1)
Vec2 eval_stab_velocity_flux(const PatchHierarchy& h, const StabOperators* stab, const DiscreteField& f,
                             const InterfaceSegment& s, int side, const Vec2& x);
// t-weighted average of the side fluxes, both expressed with n_i
Vec2 averaged_flux(const PatchHierarchy& h, const StabOperators* stab, const DiscreteField& f, const InterfaceSegment& s,
                   double t, const Vec2& x);

// max over interface-owning elements K of sup_v ||h^{1/2} D R^v(v) n||_{Gamma cap K} / ||Dv||_{K' cap Omega},
// with K' = K where no velocity operator is attached (scalar components, constants excluded)
double velocity_stability_ratio(const PatchHierarchy& h, const StabOperators* stab);

} // namespace ovs
