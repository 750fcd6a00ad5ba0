#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace ovs {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

class KnotVector {
public:
    KnotVector() = default;
    // validates: open, non-decreasing, in [0,1], interior multiplicity <= degree
    KnotVector(int degree, std::vector<double> knots);

    static KnotVector from_breakpoints(int degree, const std::vector<double>& breaks, int regularity);
    static KnotVector uniform(int degree, int elements, int regularity);

    int degree() const { return k_; }
    const std::vector<double>& knots() const { return xi_; }
    int num_basis() const { return static_cast<int>(xi_.size()) - k_ - 1; }
    std::vector<double> breakpoints() const { return breaks_; }
    std::vector<int> multiplicities() const;
    int num_elements() const { return static_cast<int>(breaks_.size()) - 1; }
    // knot index i with xi_i < xi_{i+1} spanning element e
    int element_span(int e) const { return spans_[e]; }
    // k minus the largest interior multiplicity; k-1 when there are no interior knots
    int regularity() const;
    bool uniform_regularity() const;

private:
    int k_ = 0;
    std::vector<double> xi_;
    std::vector<double> breaks_;
    std::vector<int> spans_;
};

// i with xi_i <= x < xi_{i+1}; x = 1 maps to the last nonempty span
int find_span(const KnotVector& kv, double x);
// element (breakpoint interval) containing x, same closure convention
int find_element(const KnotVector& kv, double x);

// nonzero basis values at x; function index of entry a is span - k + a
Eigen::VectorXd eval_basis(const KnotVector& kv, double x);

// (r+1) x (k+1) table, row d holds d-th derivatives
Eigen::MatrixXd eval_basis_ders(const KnotVector& kv, double x, int r);
// same, with the span fixed by the caller (used to evaluate one-sided on element edges)
Eigen::MatrixXd eval_basis_ders_span(const KnotVector& kv, int span, double x, int r);

// brute-force recursive Cox-de Boor, 0/0 = 0, right closure at x = 1 (test oracle)
double cox_de_boor(const KnotVector& kv, int i, int k, double x);

// Boehm insertion of a single knot into a curve with coefficient rows
void insert_knot(KnotVector& kv, Eigen::MatrixXd& coefs, double x);
// midpoint of every nonempty interval inserted with the given multiplicity
KnotVector dyadic_refine(const KnotVector& kv, int multiplicity);
KnotVector dyadic_refine(const KnotVector& kv);
// coefficients of the same curve on the refined knots
Eigen::MatrixXd refine_coefficients(const KnotVector& kv, const Eigen::MatrixXd& coefs, const KnotVector& fine);

struct ElementBox {
    double u0, u1, v0, v1;
};

struct TensorBasis {
    std::vector<int> index; // global basis indices, local order a = jj*(k+1) + ii
    Eigen::VectorXd val, du, dv;
};

class TensorSplineSpace {
public:
    TensorSplineSpace() = default;
    // alpha < 0: take the regularity from the interior knots (k-1 if there are none)
    TensorSplineSpace(KnotVector ku, KnotVector kv, int alpha = -1);

    const KnotVector& knots_u() const { return ku_; }
    const KnotVector& knots_v() const { return kv_; }
    int degree() const { return ku_.degree(); }
    int regularity() const { return alpha_; }
    int nu() const { return ku_.num_basis(); }
    int nv() const { return kv_.num_basis(); }
    int num_basis() const { return nu() * nv(); }
    int nex() const { return ku_.num_elements(); }
    int ney() const { return kv_.num_elements(); }
    int num_elements() const { return nex() * ney(); }
    int element_index(int ex, int ey) const { return ey * nex() + ex; }
    std::array<int, 2> element_coords(int e) const { return {e % nex(), e / nex()}; }
    ElementBox element_box(int e) const;
    int find_element(const Vec2& xi) const;
    std::vector<int> active_basis(int e) const;
    // element range [ex0,ex1] x [ey0,ey1] of the support of a basis function
    std::array<int, 4> basis_support(int idx) const;
    std::vector<int> support_extension(int e) const;
    // local basis on element e at parametric point xi
    TensorBasis eval(int e, const Vec2& xi) const;
    // smallest edge over diameter in parametric space
    double shape_regularity() const;

private:
    KnotVector ku_, kv_;
    int alpha_ = 0;
};

TensorSplineSpace dyadic_refine(const TensorSplineSpace& s);

struct TaylorHoodPair {
    int k = 2;     // pressure degree
    int alpha = 1; // regularity of both spaces
    TensorSplineSpace velocity, pressure;
    static TaylorHoodPair make(const std::vector<double>& breaks_u, const std::vector<double>& breaks_v, int k, int alpha);
};

TaylorHoodPair dyadic_refine(const TaylorHoodPair& th);

struct GeoEval {
    Vec2 x;
    Mat2 jac; // columns d/du, d/dv
    double det;
};

class GeometryMap {
public:
    GeometryMap() = default;
    GeometryMap(TensorSplineSpace space, std::vector<Vec2> ctrl);

    static GeometryMap bilinear(const Vec2& p00, const Vec2& p10, const Vec2& p01, const Vec2& p11);
    static GeometryMap affine(const Mat2& a, const Vec2& b);

    const TensorSplineSpace& space() const { return space_; }
    const std::vector<Vec2>& control_points() const { return ctrl_; }

    // no determinant check
    GeoEval eval_raw(const Vec2& xi) const;
    // Newton inverse; returns false when it fails to converge inside [0,1]^2 (with slack)
    bool inverse(const Vec2& x, const Vec2& guess, Vec2& xi, double tol = 1e-14) const;
    bool is_affine() const;

private:
    TensorSplineSpace space_;
    std::vector<Vec2> ctrl_;
};

// throws SingularGeometryError when det <= 0
GeoEval eval_geometry(const GeometryMap& map, const Vec2& xi);
GeometryMap dyadic_refine(const GeometryMap& map);

} // namespace ovs
