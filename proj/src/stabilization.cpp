#include "ovstokes/stabilization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "ovstokes/errors.hpp"

namespace ovs {

namespace {

// Legendre values and derivatives up to degree n at X
void legendre(int n, double X, Eigen::VectorXd& p, Eigen::VectorXd& dp)
{
    p.resize(n + 1);
    dp.resize(n + 1);
    p[0] = 1.0;
    dp[0] = 0.0;
    if (n >= 1) {
        p[1] = X;
        dp[1] = 1.0;
    }
    for (int m = 2; m <= n; ++m) {
        p[m] = ((2.0 * m - 1.0) * X * p[m - 1] - (m - 1.0) * p[m - 2]) / m;
        dp[m] = dp[m - 2] + (2.0 * m - 1.0) * p[m - 1];
    }
}

const TensorSplineSpace& field_space(const PatchHierarchy& h, int p, Field f)
{
    return f == Field::velocity ? h.patch(p).th.velocity : h.patch(p).th.pressure;
}

int field_degree(const PatchHierarchy& h, int p, Field f)
{
    return f == Field::velocity ? h.patch(p).th.k + 1 : h.patch(p).th.k;
}

} // namespace

ExtrapolationFrame ExtrapolationFrame::on_element(const GeometryMap& geo, const ElementBox& box, int degree)
{
    ExtrapolationFrame f;
    f.degree = degree;
    GeoEval g = geo.eval_raw({0.5 * (box.u0 + box.u1), 0.5 * (box.v0 + box.v1)});
    f.center = g.x;
    f.A = g.jac * Vec2(0.5 * (box.u1 - box.u0), 0.5 * (box.v1 - box.v0)).asDiagonal();
    const double det = f.A.determinant();
    if (!(det > 0.0) || !std::isfinite(det)) throw FrameConditioningError("degenerate donor cell");
    f.A_inv = f.A.inverse();
    return f;
}

Eigen::VectorXd ExtrapolationFrame::eval(const Vec2& x) const
{
    return eval_grad(x).row(0).transpose();
}

Eigen::Matrix<double, 3, Eigen::Dynamic> ExtrapolationFrame::eval_grad(const Vec2& x) const
{
    const Vec2 X = local(x);
    Eigen::VectorXd px, dpx, py, dpy;
    legendre(degree, X.x(), px, dpx);
    legendre(degree, X.y(), py, dpy);
    Eigen::Matrix<double, 3, Eigen::Dynamic> r(3, size());
    for (int b = 0; b <= degree; ++b)
        for (int a = 0; a <= degree; ++a) {
            int m = b * (degree + 1) + a;
            r(0, m) = px[a] * py[b];
            // grad_x = A^{-T} grad_X
            const double gX = dpx[a] * py[b], gY = px[a] * dpy[b];
            r(1, m) = A_inv(0, 0) * gX + A_inv(1, 0) * gY;
            r(2, m) = A_inv(0, 1) * gX + A_inv(1, 1) * gY;
        }
    return r;
}

LocalProjection build_local_projection(const PatchHierarchy& h, int patch, int elem, Field field, bool visible_only)
{
    const auto& space = field_space(h, patch, field);
    LocalProjection L;
    L.patch = patch;
    L.elem = elem;
    L.frame = ExtrapolationFrame::on_element(h.patch(patch).geo, space.element_box(elem), field_degree(h, patch, field));
    L.dofs = space.active_basis(elem);
    const int n = std::max(space.degree(), L.frame.degree) + 2;
    auto qp = visible_only ? h.element_quadrature(patch, elem, n, n + 1) : h.full_element_quadrature(patch, elem, n);
    const int np = L.frame.size(), nd = static_cast<int>(L.dofs.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(np, np), G = Eigen::MatrixXd::Zero(np, nd);
    for (const auto& q : qp) {
        Eigen::VectorXd phi = L.frame.eval(q.x);
        TensorBasis tb = space.eval(elem, q.xi);
        M.noalias() += q.w * phi * phi.transpose();
        G.noalias() += q.w * phi * tb.val.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
    L.mass_condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    if (!(lmin > 0.0) || L.mass_condition > 1e14) {
        std::ostringstream os;
        os << "local mass matrix on donor element " << elem << " of patch " << patch << " is singular (condition "
           << L.mass_condition << ")";
        throw FrameConditioningError(os.str());
    }
    L.P = M.ldlt().solve(G);
    return L;
}

StabOperators::StabOperators(const PatchHierarchy& h, StabOptions opt) : opt_(opt)
{
    const int N = h.num_patches();
    pmap_.resize(N);
    vmap_.resize(N);
    for (int p = 0; p < N; ++p) {
        pmap_[p].assign(h.patch(p).elements.size(), -1);
        vmap_[p].assign(h.patch(p).elements.size(), -1);
    }
    if (!opt_.enabled) return;
    auto check_donor = [&](int p, int e) {
        const auto& K = h.patch(p).elements[e];
        if (K.donor_patch < 0) {
            std::ostringstream os;
            os << "bad element " << e << " of patch " << p << " has no good neighbor";
            throw ConfigurationError(os.str());
        }
        return std::make_pair(K.donor_patch, K.donor_elem);
    };
    for (int p = 0; p < N; ++p)
        for (int e = 0; e < static_cast<int>(h.patch(p).elements.size()); ++e) {
            const auto& K = h.patch(p).elements[e];
            if (!K.active || K.good) continue;
            auto [dp, de] = check_donor(p, e);
            pmap_[p][e] = static_cast<int>(pops_.size());
            pops_.push_back(build_local_projection(h, dp, de, Field::pressure, opt_.project_visible));
        }
    // velocity operators live on bad elements that own interface segments
    std::set<std::pair<int, int>> owners;
    for (const auto& s : h.interfaces()) {
        owners.insert({s.i, s.elem_i});
        owners.insert({s.j, s.elem_j});
    }
    for (auto [p, e] : owners) {
        const auto& K = h.patch(p).elements[e];
        if (!K.active || K.good) continue;
        auto [dp, de] = check_donor(p, e);
        vmap_[p][e] = static_cast<int>(vops_.size());
        vops_.push_back(build_local_projection(h, dp, de, Field::velocity, opt_.project_visible));
    }
}

const LocalProjection* StabOperators::pressure(int p, int e) const
{
    int i = pmap_[p][e];
    return i < 0 ? nullptr : &pops_[i];
}

const LocalProjection* StabOperators::velocity(int p, int e) const
{
    int i = vmap_[p][e];
    return i < 0 ? nullptr : &vops_[i];
}

int StabOperators::num_pressure_ops() const { return static_cast<int>(pops_.size()); }
int StabOperators::num_velocity_ops() const { return static_cast<int>(vops_.size()); }

PointBasis native_basis(const PatchHierarchy& h, int patch, int elem, Field field, const std::vector<Vec2>& xis)
{
    const auto& space = field_space(h, patch, field);
    const auto& geo = h.patch(patch).geo;
    PointBasis b;
    b.patch = patch;
    b.dofs = space.active_basis(elem);
    const int np = static_cast<int>(xis.size()), nd = static_cast<int>(b.dofs.size());
    b.val.resize(np, nd);
    b.gx.resize(np, nd);
    b.gy.resize(np, nd);
    for (int q = 0; q < np; ++q) {
        TensorBasis tb = space.eval(elem, xis[q]);
        GeoEval g = geo.eval_raw(xis[q]);
        Mat2 jinv_t = g.jac.inverse().transpose();
        b.val.row(q) = tb.val.transpose();
        b.gx.row(q) = (jinv_t(0, 0) * tb.du + jinv_t(0, 1) * tb.dv).transpose();
        b.gy.row(q) = (jinv_t(1, 0) * tb.du + jinv_t(1, 1) * tb.dv).transpose();
    }
    return b;
}

PointBasis stab_basis(const PatchHierarchy& h, const StabOperators* stab, int patch, int elem, Field field,
                      const std::vector<Vec2>& xis, const std::vector<Vec2>& xs)
{
    const LocalProjection* op = nullptr;
    if (stab) op = field == Field::velocity ? stab->velocity(patch, elem) : stab->pressure(patch, elem);
    if (!op) return native_basis(h, patch, elem, field, xis);
    PointBasis b;
    b.patch = op->patch;
    b.dofs = op->dofs;
    const int np = static_cast<int>(xs.size()), nd = static_cast<int>(b.dofs.size());
    b.val.resize(np, nd);
    b.gx.resize(np, nd);
    b.gy.resize(np, nd);
    for (int q = 0; q < np; ++q) {
        auto phi = op->frame.eval_grad(xs[q]);
        b.val.row(q) = phi.row(0) * op->P;
        b.gx.row(q) = phi.row(1) * op->P;
        b.gy.row(q) = phi.row(2) * op->P;
    }
    return b;
}

DiscreteField DiscreteField::zeros(const PatchHierarchy& h)
{
    DiscreteField f;
    for (int p = 0; p < h.num_patches(); ++p) {
        f.ux.push_back(Eigen::VectorXd::Zero(h.patch(p).th.velocity.num_basis()));
        f.uy.push_back(Eigen::VectorXd::Zero(h.patch(p).th.velocity.num_basis()));
        f.p.push_back(Eigen::VectorXd::Zero(h.patch(p).th.pressure.num_basis()));
    }
    return f;
}

namespace {

double dot_dofs(const Eigen::RowVectorXd& row, const std::vector<int>& dofs, const Eigen::VectorXd& c)
{
    double s = 0.0;
    for (std::size_t a = 0; a < dofs.size(); ++a) s += row[a] * c[dofs[a]];
    return s;
}

} // namespace

double eval_stab_pressure(const PatchHierarchy& h, const StabOperators* stab, const DiscreteField& f, int p, int e,
                          const Vec2& x)
{
    Vec2 xi = h.to_parametric(p, e, x);
    PointBasis b = stab_basis(h, stab, p, e, Field::pressure, {xi}, {x});
    return dot_dofs(b.val.row(0), b.dofs, f.p[b.patch]);
}

Vec2 eval_stab_velocity_flux(const PatchHierarchy& h, const StabOperators* stab, const DiscreteField& f,
                             const InterfaceSegment& s, int side, const Vec2& x)
{
    int p = side == 0 ? s.i : s.j;
    int e = side == 0 ? s.elem_i : s.elem_j;
    Vec2 n = side == 0 ? s.normal : Vec2(-s.normal);
    Vec2 xi = h.to_parametric(p, e, x);
    PointBasis b = stab_basis(h, stab, p, e, Field::velocity, {xi}, {x});
    const auto& ux = f.ux[b.patch];
    const auto& uy = f.uy[b.patch];
    Mat2 D;
    D << dot_dofs(b.gx.row(0), b.dofs, ux), dot_dofs(b.gy.row(0), b.dofs, ux), dot_dofs(b.gx.row(0), b.dofs, uy),
        dot_dofs(b.gy.row(0), b.dofs, uy);
    return D * n;
}

Vec2 averaged_flux(const PatchHierarchy& h, const StabOperators* stab, const DiscreteField& f, const InterfaceSegment& s,
                   double t, const Vec2& x)
{
    if (t != 0.5 && t != 1.0) throw ParameterError("flux weight t must be 1/2 or 1");
    Vec2 fi = eval_stab_velocity_flux(h, stab, f, s, 0, x);
    if (t == 1.0) return fi;
    Vec2 fj = eval_stab_velocity_flux(h, stab, f, s, 1, x);
    // fj carries n_j = -n_i
    return t * fi - (1.0 - t) * fj;
}

double velocity_stability_ratio(const PatchHierarchy& h, const StabOperators* stab)
{
    std::map<std::pair<int, int>, Eigen::MatrixXd> num;
    for (const auto& s : h.interfaces()) {
        const int deg = h.patch(s.i).th.k + 1;
        auto pts = h.segment_quadrature(s, deg + 3);
        for (int side = 0; side < 2; ++side) {
            const int p = side == 0 ? s.i : s.j, e = side == 0 ? s.elem_i : s.elem_j;
            if (p < 0 || e < 0) continue;
            const Vec2 n = side == 0 ? s.normal : Vec2(-s.normal);
            std::vector<Vec2> xis, xs;
            for (const auto& q : pts) {
                xis.push_back(side == 0 ? q.xi_i : q.xi_j);
                xs.push_back(q.x);
            }
            PointBasis b = stab_basis(h, stab, p, e, Field::velocity, xis, xs);
            Eigen::MatrixXd g = n.x() * b.gx + n.y() * b.gy;
            const double hk = h.patch(p).elements[e].h;
            Eigen::MatrixXd& N = num[{p, e}];
            if (N.size() == 0) N = Eigen::MatrixXd::Zero(g.cols(), g.cols());
            for (std::size_t q = 0; q < pts.size(); ++q) N.noalias() += hk * pts[q].w * g.row(q).transpose() * g.row(q);
        }
    }
    double worst = 0.0;
    for (const auto& [key, N] : num) {
        auto [p, e] = key;
        const LocalProjection* op = stab ? stab->velocity(p, e) : nullptr;
        const int dp = op ? op->patch : p, de = op ? op->elem : e;
        const int n = h.patch(dp).th.k + 4;
        std::vector<Vec2> xis;
        auto qp = h.element_quadrature(dp, de, n, n + 1);
        for (const auto& q : qp) xis.push_back(q.xi);
        PointBasis b = native_basis(h, dp, de, Field::velocity, xis);
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(b.val.cols(), b.val.cols());
        for (std::size_t q = 0; q < qp.size(); ++q)
            D.noalias() += qp[q].w * (b.gx.row(q).transpose() * b.gx.row(q) + b.gy.row(q).transpose() * b.gy.row(q));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
        const double lmax = es.eigenvalues().maxCoeff();
        std::vector<int> keep;
        for (int a = 0; a < D.rows(); ++a)
            if (es.eigenvalues()[a] > 1e-13 * lmax) keep.push_back(a);
        Eigen::MatrixXd T(D.rows(), keep.size());
        for (std::size_t a = 0; a < keep.size(); ++a)
            T.col(a) = es.eigenvectors().col(keep[a]) / std::sqrt(es.eigenvalues()[keep[a]]);
        Eigen::MatrixXd R = T.transpose() * N * T;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(R, Eigen::EigenvaluesOnly);
        worst = std::max(worst, std::sqrt(std::max(0.0, er.eigenvalues().maxCoeff())));
    }
    return worst;
}

} // namespace ovs
