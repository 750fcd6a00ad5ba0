#include "ovstokes/splines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ovstokes/errors.hpp"

namespace ovs {

KnotVector::KnotVector(int degree, std::vector<double> knots) : k_(degree), xi_(std::move(knots))
{
    if (k_ < 1) throw GeometryError("knot vector degree must be >= 1");
    const int m = static_cast<int>(xi_.size());
    if (m < 2 * (k_ + 1)) throw GeometryError("knot vector too short for its degree");
    for (int i = 0; i + 1 < m; ++i)
        if (xi_[i + 1] < xi_[i]) throw GeometryError("knot vector must be non-decreasing");
    if (xi_.front() < 0.0 || xi_.back() > 1.0) throw GeometryError("knots must lie in [0,1]");
    for (int i = 0; i <= k_; ++i)
        if (xi_[i] != xi_[0] || xi_[m - 1 - i] != xi_[m - 1])
            throw GeometryError("knot vector is not open");
    if (xi_[k_ + 1] == xi_[0] || xi_[m - k_ - 2] == xi_[m - 1])
        throw GeometryError("end knots repeated more than k+1 times");
    for (int i = 0; i < m; ++i) {
        if (i + 1 < m && xi_[i + 1] > xi_[i]) spans_.push_back(i);
        if (i > 0 && xi_[i] == xi_[i - 1]) continue;
        breaks_.push_back(xi_[i]);
    }
    auto mult = multiplicities();
    for (std::size_t j = 1; j + 1 < mult.size(); ++j)
        if (mult[j] > k_) throw GeometryError("interior knot multiplicity exceeds degree");
}

KnotVector KnotVector::from_breakpoints(int degree, const std::vector<double>& breaks, int regularity)
{
    if (regularity < 0 || regularity >= degree) throw GeometryError("regularity must satisfy 0 <= alpha < k");
    if (breaks.size() < 2) throw GeometryError("need at least two breakpoints");
    std::vector<double> xi(degree + 1, breaks.front());
    for (std::size_t j = 1; j + 1 < breaks.size(); ++j)
        for (int r = 0; r < degree - regularity; ++r) xi.push_back(breaks[j]);
    for (int r = 0; r <= degree; ++r) xi.push_back(breaks.back());
    return KnotVector(degree, std::move(xi));
}

KnotVector KnotVector::uniform(int degree, int elements, int regularity)
{
    if (elements < 1) throw GeometryError("need at least one element");
    std::vector<double> b(elements + 1);
    for (int i = 0; i <= elements; ++i) b[i] = static_cast<double>(i) / elements;
    b.back() = 1.0;
    return from_breakpoints(degree, b, regularity);
}

std::vector<int> KnotVector::multiplicities() const
{
    std::vector<int> m;
    for (std::size_t i = 0; i < xi_.size(); ++i) {
        if (i > 0 && xi_[i] == xi_[i - 1])
            ++m.back();
        else
            m.push_back(1);
    }
    return m;
}

int KnotVector::regularity() const
{
    auto m = multiplicities();
    int mx = 0;
    for (std::size_t j = 1; j + 1 < m.size(); ++j) mx = std::max(mx, m[j]);
    return mx == 0 ? k_ - 1 : k_ - mx;
}

bool KnotVector::uniform_regularity() const
{
    auto m = multiplicities();
    for (std::size_t j = 2; j + 1 < m.size(); ++j)
        if (m[j] != m[1]) return false;
    return true;
}

int find_span(const KnotVector& kv, double x)
{
    const auto& xi = kv.knots();
    const int k = kv.degree();
    const int n = kv.num_basis();
    if (!(x >= xi.front() && x <= xi.back())) {
        std::ostringstream os;
        os << "parameter " << x << " outside [" << xi.front() << "," << xi.back() << "]";
        throw DomainError(os.str());
    }
    if (x >= xi[n]) return n - 1;
    // last i in [k, n-1] with xi_i <= x
    auto it = std::upper_bound(xi.begin() + k, xi.begin() + n, x);
    return static_cast<int>(it - xi.begin()) - 1;
}

int find_element(const KnotVector& kv, double x)
{
    const int s = find_span(kv, x);
    const int ne = kv.num_elements();
    int lo = 0, hi = ne - 1;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (kv.element_span(mid) < s)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

Eigen::MatrixXd eval_basis_ders_span(const KnotVector& kv, int span, double x, int r)
{
    const int k = kv.degree();
    if (r < 0 || r > k) throw DegreeError("derivative order must satisfy 0 <= r <= k");
    const auto& U = kv.knots();
    Eigen::MatrixXd ndu(k + 1, k + 1);
    std::vector<double> left(k + 1), right(k + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= k; ++j) {
        left[j] = x - U[span + 1 - j];
        right[j] = U[span + j] - x;
        double saved = 0.0;
        for (int q = 0; q < j; ++q) {
            ndu(j, q) = right[q + 1] + left[j - q];
            double temp = ndu(j, q) == 0.0 ? 0.0 : ndu(q, j - 1) / ndu(j, q);
            ndu(q, j) = saved + right[q + 1] * temp;
            saved = left[j - q] * temp;
        }
        ndu(j, j) = saved;
    }
    Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(r + 1, k + 1);
    for (int j = 0; j <= k; ++j) ders(0, j) = ndu(j, k);
    Eigen::MatrixXd a(2, k + 1);
    for (int q = 0; q <= k; ++q) {
        int s1 = 0, s2 = 1;
        a(0, 0) = 1.0;
        for (int d = 1; d <= r; ++d) {
            double dd = 0.0;
            int rk = q - d, pk = k - d;
            if (q >= d) {
                a(s2, 0) = ndu(pk + 1, rk) == 0.0 ? 0.0 : a(s1, 0) / ndu(pk + 1, rk);
                dd = a(s2, 0) * ndu(rk, pk);
            }
            int j1 = rk >= -1 ? 1 : -rk;
            int j2 = (q - 1 <= pk) ? d - 1 : k - q;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = ndu(pk + 1, rk + j) == 0.0 ? 0.0 : (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                dd += a(s2, j) * ndu(rk + j, pk);
            }
            if (q <= pk) {
                a(s2, d) = ndu(pk + 1, q) == 0.0 ? 0.0 : -a(s1, d - 1) / ndu(pk + 1, q);
                dd += a(s2, d) * ndu(q, pk);
            }
            ders(d, q) = dd;
            std::swap(s1, s2);
        }
    }
    double f = k;
    for (int d = 1; d <= r; ++d) {
        ders.row(d) *= f;
        f *= (k - d);
    }
    return ders;
}

Eigen::MatrixXd eval_basis_ders(const KnotVector& kv, double x, int r)
{
    if (r > kv.degree()) throw DegreeError("derivative order exceeds degree");
    return eval_basis_ders_span(kv, find_span(kv, x), x, r);
}

Eigen::VectorXd eval_basis(const KnotVector& kv, double x)
{
    return eval_basis_ders(kv, x, 0).row(0).transpose();
}

double cox_de_boor(const KnotVector& kv, int i, int k, double x)
{
    const auto& U = kv.knots();
    if (k == 0) {
        if (U[i] <= x && x < U[i + 1]) return 1.0;
        // right closure: the last nonempty interval includes x = 1
        if (x == U.back() && U[i] < U[i + 1] && U[i + 1] == U.back()) return 1.0;
        return 0.0;
    }
    double a = 0.0, b = 0.0;
    double d1 = U[i + k] - U[i];
    double d2 = U[i + k + 1] - U[i + 1];
    if (d1 != 0.0) a = (x - U[i]) / d1 * cox_de_boor(kv, i, k - 1, x);
    if (d2 != 0.0) b = (U[i + k + 1] - x) / d2 * cox_de_boor(kv, i + 1, k - 1, x);
    return a + b;
}

void insert_knot(KnotVector& kv, Eigen::MatrixXd& coefs, double x)
{
    const int k = kv.degree();
    const auto& U = kv.knots();
    const int n = kv.num_basis();
    if (coefs.rows() != n) throw GeometryError("coefficient count does not match knot vector");
    int s = find_span(kv, x);
    if (x == U.back()) throw GeometryError("cannot insert an end knot");
    Eigen::MatrixXd Q(n + 1, coefs.cols());
    for (int i = 0; i <= s - k; ++i) Q.row(i) = coefs.row(i);
    for (int i = s + 1; i <= n; ++i) Q.row(i) = coefs.row(i - 1);
    for (int i = s - k + 1; i <= s; ++i) {
        double den = U[i + k] - U[i];
        double a = den == 0.0 ? 0.0 : (x - U[i]) / den;
        Q.row(i) = a * coefs.row(i) + (1.0 - a) * coefs.row(i - 1);
    }
    std::vector<double> nu(U);
    nu.insert(nu.begin() + s + 1, x);
    kv = KnotVector(k, std::move(nu));
    coefs = std::move(Q);
}

KnotVector dyadic_refine(const KnotVector& kv, int multiplicity)
{
    if (multiplicity < 1 || multiplicity > kv.degree()) throw GeometryError("invalid refinement multiplicity");
    std::vector<double> xi = kv.knots();
    auto br = kv.breakpoints();
    for (std::size_t j = 0; j + 1 < br.size(); ++j) {
        double mid = 0.5 * (br[j] + br[j + 1]);
        for (int r = 0; r < multiplicity; ++r) xi.push_back(mid);
    }
    std::sort(xi.begin(), xi.end());
    return KnotVector(kv.degree(), std::move(xi));
}

KnotVector dyadic_refine(const KnotVector& kv)
{
    return dyadic_refine(kv, kv.degree() - kv.regularity());
}

Eigen::MatrixXd refine_coefficients(const KnotVector& kv, const Eigen::MatrixXd& coefs, const KnotVector& fine)
{
    if (fine.degree() != kv.degree()) throw GeometryError("refinement must keep the degree");
    // knots of fine not in kv (with multiplicity)
    std::vector<double> extra;
    const auto& a = kv.knots();
    const auto& b = fine.knots();
    std::size_t i = 0;
    for (double x : b) {
        if (i < a.size() && a[i] == x)
            ++i;
        else
            extra.push_back(x);
    }
    if (i != a.size()) throw GeometryError("refined knot vector does not contain the coarse one");
    KnotVector cur = kv;
    Eigen::MatrixXd c = coefs;
    for (double x : extra) insert_knot(cur, c, x);
    return c;
}

TensorSplineSpace::TensorSplineSpace(KnotVector ku, KnotVector kv, int alpha) : ku_(std::move(ku)), kv_(std::move(kv))
{
    if (ku_.degree() != kv_.degree()) throw GeometryError("tensor space degrees must be isotropic");
    if (!ku_.uniform_regularity() || !kv_.uniform_regularity())
        throw GeometryError("regularity must be the same at all interior breakpoints");
    const int k = ku_.degree();
    bool iu = ku_.num_elements() > 1, iv = kv_.num_elements() > 1;
    if (iu && iv && ku_.regularity() != kv_.regularity())
        throw GeometryError("regularity must be the same in both directions");
    int from_knots = iu ? ku_.regularity() : (iv ? kv_.regularity() : -1);
    if (alpha >= 0) {
        if (from_knots >= 0 && from_knots != alpha) throw GeometryError("regularity does not match knots");
        alpha_ = alpha;
    } else {
        alpha_ = from_knots >= 0 ? from_knots : k - 1;
    }
}

ElementBox TensorSplineSpace::element_box(int e) const
{
    auto c = element_coords(e);
    const auto& U = ku_.knots();
    const auto& V = kv_.knots();
    int su = ku_.element_span(c[0]), sv = kv_.element_span(c[1]);
    return {U[su], U[su + 1], V[sv], V[sv + 1]};
}

int TensorSplineSpace::find_element(const Vec2& xi) const
{
    return element_index(ovs::find_element(ku_, xi.x()), ovs::find_element(kv_, xi.y()));
}

std::vector<int> TensorSplineSpace::active_basis(int e) const
{
    auto c = element_coords(e);
    const int k = degree();
    int su = ku_.element_span(c[0]), sv = kv_.element_span(c[1]);
    std::vector<int> idx;
    idx.reserve((k + 1) * (k + 1));
    for (int jj = 0; jj <= k; ++jj)
        for (int ii = 0; ii <= k; ++ii) idx.push_back((sv - k + jj) * nu() + (su - k + ii));
    return idx;
}

namespace {

// elements whose span index lies in [i, i+k] for function i
std::array<int, 2> support_range(const KnotVector& kv, int i)
{
    int k = kv.degree();
    int lo = -1, hi = -1;
    for (int e = 0; e < kv.num_elements(); ++e) {
        int s = kv.element_span(e);
        if (s >= i && s <= i + k) {
            if (lo < 0) lo = e;
            hi = e;
        }
    }
    return {lo, hi};
}

} // namespace

std::array<int, 4> TensorSplineSpace::basis_support(int idx) const
{
    auto ru = support_range(ku_, idx % nu());
    auto rv = support_range(kv_, idx / nu());
    return {ru[0], ru[1], rv[0], rv[1]};
}

std::vector<int> TensorSplineSpace::support_extension(int e) const
{
    int ex0 = nex(), ex1 = -1, ey0 = ney(), ey1 = -1;
    for (int b : active_basis(e)) {
        auto s = basis_support(b);
        ex0 = std::min(ex0, s[0]);
        ex1 = std::max(ex1, s[1]);
        ey0 = std::min(ey0, s[2]);
        ey1 = std::max(ey1, s[3]);
    }
    std::vector<int> out;
    for (int ey = ey0; ey <= ey1; ++ey)
        for (int ex = ex0; ex <= ex1; ++ex) out.push_back(element_index(ex, ey));
    return out;
}

TensorBasis TensorSplineSpace::eval(int e, const Vec2& xi) const
{
    auto c = element_coords(e);
    const int k = degree();
    int su = ku_.element_span(c[0]), sv = kv_.element_span(c[1]);
    Eigen::MatrixXd bu = eval_basis_ders_span(ku_, su, xi.x(), 1);
    Eigen::MatrixXd bv = eval_basis_ders_span(kv_, sv, xi.y(), 1);
    TensorBasis t;
    const int nl = (k + 1) * (k + 1);
    t.index.resize(nl);
    t.val.resize(nl);
    t.du.resize(nl);
    t.dv.resize(nl);
    for (int jj = 0; jj <= k; ++jj)
        for (int ii = 0; ii <= k; ++ii) {
            int a = jj * (k + 1) + ii;
            t.index[a] = (sv - k + jj) * nu() + (su - k + ii);
            t.val[a] = bu(0, ii) * bv(0, jj);
            t.du[a] = bu(1, ii) * bv(0, jj);
            t.dv[a] = bu(0, ii) * bv(1, jj);
        }
    return t;
}

double TensorSplineSpace::shape_regularity() const
{
    double r = 1.0;
    for (int e = 0; e < num_elements(); ++e) {
        auto b = element_box(e);
        double du = b.u1 - b.u0, dv = b.v1 - b.v0;
        r = std::min(r, std::min(du, dv) / std::hypot(du, dv));
    }
    return r;
}

TensorSplineSpace dyadic_refine(const TensorSplineSpace& s)
{
    int m = s.degree() - s.regularity();
    return TensorSplineSpace(dyadic_refine(s.knots_u(), m), dyadic_refine(s.knots_v(), m), s.regularity());
}

TaylorHoodPair TaylorHoodPair::make(const std::vector<double>& bu, const std::vector<double>& bv, int k, int alpha)
{
    if (k < 1) throw GeometryError("pressure degree must be >= 1");
    if (alpha < 0 || alpha >= k) throw GeometryError("regularity must satisfy 0 <= alpha < k");
    TaylorHoodPair th;
    th.k = k;
    th.alpha = alpha;
    th.velocity = TensorSplineSpace(KnotVector::from_breakpoints(k + 1, bu, alpha),
                                    KnotVector::from_breakpoints(k + 1, bv, alpha), alpha);
    th.pressure = TensorSplineSpace(KnotVector::from_breakpoints(k, bu, alpha),
                                    KnotVector::from_breakpoints(k, bv, alpha), alpha);
    return th;
}

TaylorHoodPair dyadic_refine(const TaylorHoodPair& th)
{
    auto refine_breaks = [](const std::vector<double>& b) {
        std::vector<double> r;
        for (std::size_t j = 0; j + 1 < b.size(); ++j) {
            r.push_back(b[j]);
            r.push_back(0.5 * (b[j] + b[j + 1]));
        }
        r.push_back(b.back());
        return r;
    };
    return TaylorHoodPair::make(refine_breaks(th.pressure.knots_u().breakpoints()),
                                refine_breaks(th.pressure.knots_v().breakpoints()), th.k, th.alpha);
}

GeometryMap::GeometryMap(TensorSplineSpace space, std::vector<Vec2> ctrl) : space_(std::move(space)), ctrl_(std::move(ctrl))
{
    if (static_cast<int>(ctrl_.size()) != space_.num_basis())
        throw GeometryError("control net size does not match the spline space");
}

GeometryMap GeometryMap::bilinear(const Vec2& p00, const Vec2& p10, const Vec2& p01, const Vec2& p11)
{
    KnotVector k1(1, {0.0, 0.0, 1.0, 1.0});
    return GeometryMap(TensorSplineSpace(k1, k1, 0), {p00, p10, p01, p11});
}

GeometryMap GeometryMap::affine(const Mat2& a, const Vec2& b)
{
    return bilinear(b, b + a.col(0), b + a.col(1), b + a.col(0) + a.col(1));
}

GeoEval GeometryMap::eval_raw(const Vec2& xi) const
{
    int e = space_.find_element(xi);
    TensorBasis t = space_.eval(e, xi);
    GeoEval g;
    g.x.setZero();
    g.jac.setZero();
    for (std::size_t a = 0; a < t.index.size(); ++a) {
        const Vec2& p = ctrl_[t.index[a]];
        g.x += t.val[a] * p;
        g.jac.col(0) += t.du[a] * p;
        g.jac.col(1) += t.dv[a] * p;
    }
    g.det = g.jac.determinant();
    return g;
}

bool GeometryMap::inverse(const Vec2& x, const Vec2& guess, Vec2& xi, double tol) const
{
    Eigen::AlignedBox2d bb;
    for (const auto& p : ctrl_) bb.extend(p);
    const double scale = std::max(bb.diagonal().norm(), 1e-300);
    xi = guess.cwiseMax(0.0).cwiseMin(1.0);
    for (int it = 0; it < 60; ++it) {
        GeoEval g = eval_raw(xi);
        Vec2 r = g.x - x;
        if (r.norm() <= tol * scale) return true;
        if (std::abs(g.det) < 1e-300) return false;
        Vec2 step = g.jac.partialPivLu().solve(r);
        Vec2 next = (xi - step).cwiseMax(0.0).cwiseMin(1.0);
        if ((next - xi).norm() < 1e-16) {
            // clamped on the boundary: accept if close enough
            return (eval_raw(next).x - x).norm() <= 1e3 * tol * scale;
        }
        xi = next;
    }
    return (eval_raw(xi).x - x).norm() <= 1e3 * tol * scale;
}

bool GeometryMap::is_affine() const
{
    GeoEval a = eval_raw(Vec2(0.0, 0.0)), b = eval_raw(Vec2(1.0, 1.0)), c = eval_raw(Vec2(0.3, 0.7));
    double s = a.jac.norm() + 1e-300;
    return (a.jac - b.jac).norm() < 1e-14 * s && (a.jac - c.jac).norm() < 1e-14 * s;
}

GeoEval eval_geometry(const GeometryMap& map, const Vec2& xi)
{
    if (xi.x() < 0.0 || xi.x() > 1.0 || xi.y() < 0.0 || xi.y() > 1.0)
        throw DomainError("parametric point outside [0,1]^2");
    GeoEval g = map.eval_raw(xi);
    if (!(g.det > 0.0)) {
        std::ostringstream os;
        os << "nonpositive Jacobian determinant " << g.det << " at (" << xi.x() << "," << xi.y() << ")";
        throw SingularGeometryError(os.str());
    }
    return g;
}

GeometryMap dyadic_refine(const GeometryMap& map)
{
    const TensorSplineSpace& s = map.space();
    int m = s.degree() - s.regularity();
    KnotVector fu = dyadic_refine(s.knots_u(), m), fv = dyadic_refine(s.knots_v(), m);
    const int nu = s.nu(), nv = s.nv(), fnu = fu.num_basis(), fnv = fv.num_basis();
    const auto& P = map.control_points();
    // refine along u, row by row
    std::vector<Vec2> tmp(fnu * nv);
    for (int j = 0; j < nv; ++j) {
        Eigen::MatrixXd c(nu, 2);
        for (int i = 0; i < nu; ++i) c.row(i) = P[j * nu + i].transpose();
        Eigen::MatrixXd f = refine_coefficients(s.knots_u(), c, fu);
        for (int i = 0; i < fnu; ++i) tmp[j * fnu + i] = f.row(i).transpose();
    }
    std::vector<Vec2> out(fnu * fnv);
    for (int i = 0; i < fnu; ++i) {
        Eigen::MatrixXd c(nv, 2);
        for (int j = 0; j < nv; ++j) c.row(j) = tmp[j * fnu + i].transpose();
        Eigen::MatrixXd f = refine_coefficients(s.knots_v(), c, fv);
        for (int j = 0; j < fnv; ++j) out[j * fnu + i] = f.row(j).transpose();
    }
    return GeometryMap(TensorSplineSpace(fu, fv, s.regularity()), std::move(out));
}

} // namespace ovs
