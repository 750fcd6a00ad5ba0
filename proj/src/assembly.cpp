#include "ovstokes/assembly.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "ovstokes/errors.hpp"
#include "ovstokes/quadrature.hpp"

namespace ovs {

namespace {

using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;

// bounded-memory triplet collection
class Accumulator {
public:
    explicit Accumulator(int n) : n_(n), acc_(n, n) {}
    void add(int i, int j, double v)
    {
        if (v == 0.0) return;
        trips_.emplace_back(i, j, v);
        if (trips_.size() >= limit_) flush();
    }
    SpMat finish()
    {
        flush();
        return acc_;
    }

private:
    void flush()
    {
        if (trips_.empty()) return;
        SpMat m(n_, n_);
        m.setFromTriplets(trips_.begin(), trips_.end());
        acc_ += m;
        trips_.clear();
    }
    int n_;
    SpMat acc_;
    std::vector<Triplet> trips_;
    std::size_t limit_ = 4000000;
};

struct VelKeys {
    std::vector<int> gx, gy;
    std::unordered_map<int, int> pos;
    int add(int x, int y)
    {
        auto it = pos.find(x);
        if (it != pos.end()) return it->second;
        int k = static_cast<int>(gx.size());
        pos.emplace(x, k);
        gx.push_back(x);
        gy.push_back(y);
        return k;
    }
};

struct PresKeys {
    std::vector<int> g;
    std::unordered_map<int, int> pos;
    int add(int x)
    {
        auto it = pos.find(x);
        if (it != pos.end()) return it->second;
        int k = static_cast<int>(g.size());
        pos.emplace(x, k);
        g.push_back(x);
        return k;
    }
};

int vol_tensor(const PatchHierarchy& h, int p, int extra) { return h.patch(p).th.k + 3 + extra; }
int vol_tri(const PatchHierarchy& h, int p, int extra) { return h.patch(p).th.k + 4 + extra; }

std::vector<Vec2> xis_of(const std::vector<QuadPoint>& q)
{
    std::vector<Vec2> r;
    r.reserve(q.size());
    for (const auto& p : q) r.push_back(p.xi);
    return r;
}

std::vector<Vec2> xs_of(const std::vector<QuadPoint>& q)
{
    std::vector<Vec2> r;
    r.reserve(q.size());
    for (const auto& p : q) r.push_back(p.x);
    return r;
}

} // namespace

double gamma_penalty(const AssemblyConfig& cfg, int velocity_degree)
{
    if (!(cfg.gamma0 > 0.0)) throw ParameterError("gamma0 must be positive");
    const double k2 = velocity_degree + 1.0;
    return cfg.gamma0 * k2 * k2;
}

bool DofMap::is_pressure(int g) const
{
    auto it = std::upper_bound(offset.begin(), offset.end(), g);
    int p = static_cast<int>(it - offset.begin()) - 1;
    return g - offset[p] >= 2 * nv[p];
}

DofMap build_dofmap(const PatchHierarchy& h, bool stabilized)
{
    DofMap dm;
    const int N = h.num_patches();
    dm.offset.push_back(0);
    for (int p = 0; p < N; ++p) {
        dm.nv.push_back(h.patch(p).th.velocity.num_basis());
        dm.np.push_back(h.patch(p).th.pressure.num_basis());
        dm.offset.push_back(dm.offset.back() + 2 * dm.nv.back() + dm.np.back());
    }
    dm.active.assign(dm.size(), 0);
    dm.dirichlet.assign(dm.size(), 0);
    dm.prescribed = Eigen::VectorXd::Zero(dm.size());
    for (int p = 0; p < N; ++p) {
        const auto& P = h.patch(p);
        for (int e = 0; e < static_cast<int>(P.elements.size()); ++e) {
            const auto& K = P.elements[e];
            if (!K.active) continue;
            for (int a : P.th.velocity.active_basis(e)) {
                dm.active[dm.ux(p, a)] = 1;
                dm.active[dm.uy(p, a)] = 1;
            }
            // with stabilization, pressures on bad elements come from donors
            if (stabilized && !K.good) continue;
            for (int a : P.th.pressure.active_basis(e)) dm.active[dm.pr(p, a)] = 1;
        }
    }
    finalize_dofmap(dm);
    return dm;
}

void finalize_dofmap(DofMap& dm)
{
    dm.free_index.assign(dm.size(), -1);
    dm.num_free = dm.num_velocity_free = dm.num_pressure_free = 0;
    for (int g = 0; g < dm.size(); ++g) {
        if (!dm.active[g] || dm.dirichlet[g]) continue;
        dm.free_index[g] = dm.num_free++;
        if (dm.is_pressure(g))
            ++dm.num_pressure_free;
        else
            ++dm.num_velocity_free;
    }
}

Eigen::SparseMatrix<double> assemble_volume(const PatchHierarchy& h, const DofMap& dm, const StabOperators* stab,
                                            int extra)
{
    Accumulator acc(dm.size());
    for (int p = 0; p < h.num_patches(); ++p) {
        const auto& P = h.patch(p);
        for (int e = 0; e < static_cast<int>(P.elements.size()); ++e) {
            if (!P.elements[e].active) continue;
            auto qp = h.element_quadrature(p, e, vol_tensor(h, p, extra), vol_tri(h, p, extra));
            if (qp.empty()) continue;
            auto xis = xis_of(qp);
            PointBasis V = native_basis(h, p, e, Field::velocity, xis);
            PointBasis Q = stab_basis(h, stab, p, e, Field::pressure, xis, xs_of(qp));
            Eigen::VectorXd w(qp.size());
            for (std::size_t q = 0; q < qp.size(); ++q) w[q] = qp[q].w;
            Eigen::MatrixXd A = V.gx.transpose() * w.asDiagonal() * V.gx + V.gy.transpose() * w.asDiagonal() * V.gy;
            A = 0.5 * (A + A.transpose()).eval();
            Eigen::MatrixXd Bx = -(Q.val.transpose() * w.asDiagonal() * V.gx);
            Eigen::MatrixXd By = -(Q.val.transpose() * w.asDiagonal() * V.gy);
            const int nvl = static_cast<int>(V.dofs.size()), nql = static_cast<int>(Q.dofs.size());
            for (int a = 0; a < nvl; ++a)
                for (int b = 0; b < nvl; ++b) {
                    acc.add(dm.ux(p, V.dofs[a]), dm.ux(p, V.dofs[b]), A(a, b));
                    acc.add(dm.uy(p, V.dofs[a]), dm.uy(p, V.dofs[b]), A(a, b));
                }
            for (int c = 0; c < nql; ++c) {
                int gq = dm.pr(Q.patch, Q.dofs[c]);
                for (int a = 0; a < nvl; ++a) {
                    int gx = dm.ux(p, V.dofs[a]), gy = dm.uy(p, V.dofs[a]);
                    acc.add(gq, gx, Bx(c, a));
                    acc.add(gx, gq, Bx(c, a));
                    acc.add(gq, gy, By(c, a));
                    acc.add(gy, gq, By(c, a));
                }
            }
        }
    }
    return acc.finish();
}

Eigen::SparseMatrix<double> assemble_interface(const PatchHierarchy& h, const DofMap& dm, const AssemblyConfig& cfg,
                                               const StabOperators* stab)
{
    if (cfg.t != 0.5 && cfg.t != 1.0) throw ParameterError("flux weight t must be 1/2 or 1");
    Accumulator acc(dm.size());
    const double t = cfg.t;
    for (const auto& s : h.interfaces()) {
        const int ki = h.patch(s.i).th.k;
        const double gamma = gamma_penalty(cfg, ki + 1);
        auto sp = h.segment_quadrature(s, ki + 3 + cfg.extra_quadrature);
        const int nq = static_cast<int>(sp.size());
        std::vector<Vec2> xi_i, xi_j, xs;
        Eigen::VectorXd w(nq);
        for (int q = 0; q < nq; ++q) {
            xi_i.push_back(sp[q].xi_i);
            xi_j.push_back(sp[q].xi_j);
            xs.push_back(sp[q].x);
            w[q] = sp[q].w;
        }
        const Vec2 n = s.normal;
        PointBasis Vi = native_basis(h, s.i, s.elem_i, Field::velocity, xi_i);
        PointBasis Vj = native_basis(h, s.j, s.elem_j, Field::velocity, xi_j);
        PointBasis Fi = stab_basis(h, stab, s.i, s.elem_i, Field::velocity, xi_i, xs);
        PointBasis Fj = stab_basis(h, stab, s.j, s.elem_j, Field::velocity, xi_j, xs);
        PointBasis Pi = stab_basis(h, stab, s.i, s.elem_i, Field::pressure, xi_i, xs);
        PointBasis Pj = stab_basis(h, stab, s.j, s.elem_j, Field::pressure, xi_j, xs);

        VelKeys vk;
        auto reg_v = [&](const PointBasis& b) {
            std::vector<int> loc;
            for (int a : b.dofs) loc.push_back(vk.add(dm.ux(b.patch, a), dm.uy(b.patch, a)));
            return loc;
        };
        auto li = reg_v(Vi), lj = reg_v(Vj), lfi = reg_v(Fi), lfj = reg_v(Fj);
        PresKeys pk;
        auto reg_p = [&](const PointBasis& b) {
            std::vector<int> loc;
            for (int a : b.dofs) loc.push_back(pk.add(dm.pr(b.patch, a)));
            return loc;
        };
        auto lpi = reg_p(Pi), lpj = reg_p(Pj);
        const int nvl = static_cast<int>(vk.gx.size()), npl = static_cast<int>(pk.g.size());

        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nq, nvl), G = Eigen::MatrixXd::Zero(nq, nvl);
        Eigen::MatrixXd Qa = Eigen::MatrixXd::Zero(nq, npl);
        const double nj_sign = cfg.literal_flux_normal ? -1.0 : 1.0;
        for (int q = 0; q < nq; ++q) {
            for (std::size_t a = 0; a < li.size(); ++a) J(q, li[a]) += Vi.val(q, a);
            for (std::size_t a = 0; a < lj.size(); ++a) J(q, lj[a]) -= Vj.val(q, a);
            for (std::size_t a = 0; a < lfi.size(); ++a) G(q, lfi[a]) += t * (Fi.gx(q, a) * n.x() + Fi.gy(q, a) * n.y());
            if (t != 1.0)
                for (std::size_t a = 0; a < lfj.size(); ++a)
                    G(q, lfj[a]) += (1.0 - t) * nj_sign * (Fj.gx(q, a) * n.x() + Fj.gy(q, a) * n.y());
            for (std::size_t a = 0; a < lpi.size(); ++a) Qa(q, lpi[a]) += t * Pi.val(q, a);
            if (t != 1.0)
                for (std::size_t a = 0; a < lpj.size(); ++a) Qa(q, lpj[a]) += (1.0 - t) * Pj.val(q, a);
        }
        Eigen::MatrixXd GJ = G.transpose() * w.asDiagonal() * J;
        Eigen::MatrixXd A = -(GJ + GJ.transpose()) + (gamma / s.h_i) * (J.transpose() * w.asDiagonal() * J);
        A = 0.5 * (A + A.transpose()).eval();
        Eigen::MatrixXd QJ = Qa.transpose() * w.asDiagonal() * J;
        for (int a = 0; a < nvl; ++a)
            for (int b = 0; b < nvl; ++b) {
                acc.add(vk.gx[a], vk.gx[b], A(a, b));
                acc.add(vk.gy[a], vk.gy[b], A(a, b));
            }
        for (int c = 0; c < npl; ++c)
            for (int a = 0; a < nvl; ++a) {
                double bx = QJ(c, a) * n.x(), by = QJ(c, a) * n.y();
                acc.add(pk.g[c], vk.gx[a], bx);
                acc.add(vk.gx[a], pk.g[c], bx);
                acc.add(pk.g[c], vk.gy[a], by);
                acc.add(vk.gy[a], pk.g[c], by);
            }
    }
    return acc.finish();
}

Eigen::VectorXd assemble_rhs(const PatchHierarchy& h, const DofMap& dm, const ExactSolution& ex, int extra)
{
    Eigen::VectorXd F = Eigen::VectorXd::Zero(dm.size());
    for (int p = 0; p < h.num_patches(); ++p) {
        const auto& P = h.patch(p);
        for (int e = 0; e < static_cast<int>(P.elements.size()); ++e) {
            if (!P.elements[e].active) continue;
            auto qp = h.element_quadrature(p, e, vol_tensor(h, p, extra), vol_tri(h, p, extra));
            PointBasis V = native_basis(h, p, e, Field::velocity, xis_of(qp));
            for (std::size_t q = 0; q < qp.size(); ++q) {
                Vec2 f = ex.f(qp[q].x);
                for (std::size_t a = 0; a < V.dofs.size(); ++a) {
                    F[dm.ux(p, V.dofs[a])] += qp[q].w * f.x() * V.val(q, a);
                    F[dm.uy(p, V.dofs[a])] += qp[q].w * f.y() * V.val(q, a);
                }
            }
        }
    }
    for (const auto& s : h.boundary()) {
        BcKind bc = h.patch(s.i).bc[s.face];
        if (bc == BcKind::dirichlet) continue;
        if (bc == BcKind::none) {
            std::ostringstream os;
            os << "boundary piece on face " << s.face << " of patch " << s.i << " has no boundary condition";
            throw ConfigurationError(os.str());
        }
        const int k = h.patch(s.i).th.k;
        auto sp = h.segment_quadrature(s, k + 4 + extra);
        std::vector<Vec2> xis;
        for (const auto& q : sp) xis.push_back(q.xi_i);
        PointBasis V = native_basis(h, s.i, s.elem_i, Field::velocity, xis);
        for (std::size_t q = 0; q < sp.size(); ++q) {
            Vec2 g = ex.traction(sp[q].x, s.normal);
            for (std::size_t a = 0; a < V.dofs.size(); ++a) {
                F[dm.ux(s.i, V.dofs[a])] += sp[q].w * g.x() * V.val(q, a);
                F[dm.uy(s.i, V.dofs[a])] += sp[q].w * g.y() * V.val(q, a);
            }
        }
    }
    return F;
}

void apply_dirichlet(const PatchHierarchy& h, DofMap& dm, const ExactSolution& ex)
{
    for (int p = 0; p < h.num_patches(); ++p) {
        const auto& P = h.patch(p);
        for (int f = 0; f < 4; ++f) {
            if (P.bc[f] != BcKind::dirichlet) continue;
            // the face must be entirely on the domain boundary
            double face_len = 0.0, bnd_len = 0.0;
            for (std::size_t v = 0; v < P.footprint.size(); ++v)
                if (P.footprint_face[v] == f)
                    face_len += (P.footprint[(v + 1) % P.footprint.size()] - P.footprint[v]).norm();
            for (const auto& s : h.boundary())
                if (s.i == p && s.face == f) bnd_len += s.length();
            if (std::abs(bnd_len - face_len) > 1e-9 * face_len) {
                std::ostringstream os;
                os << "Dirichlet face " << f << " of patch " << p << " is not a full boundary face";
                throw ConfigurationError(os.str());
            }
            const auto& V = P.th.velocity;
            const bool along_u = (f == face_bottom || f == face_top);
            const KnotVector& kv = along_u ? V.knots_u() : V.knots_v();
            const int nb = kv.num_basis();
            Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nb, nb);
            Eigen::MatrixXd R = Eigen::MatrixXd::Zero(nb, 2);
            Rule1D g = gauss_legendre(kv.degree() + 4);
            auto br = kv.breakpoints();
            for (int el = 0; el < kv.num_elements(); ++el) {
                const int span = kv.element_span(el);
                for (std::size_t q = 0; q < g.x.size(); ++q) {
                    double tq = br[el] + g.x[q] * (br[el + 1] - br[el]);
                    Vec2 xi = along_u ? Vec2(tq, f == face_bottom ? 0.0 : 1.0) : Vec2(f == face_left ? 0.0 : 1.0, tq);
                    GeoEval ge = eval_geometry(P.geo, xi);
                    double ds = (along_u ? ge.jac.col(0) : ge.jac.col(1)).norm();
                    double wq = g.w[q] * (br[el + 1] - br[el]) * ds;
                    Eigen::MatrixXd N = eval_basis_ders_span(kv, span, tq, 0);
                    Vec2 u = ex.u(ge.x);
                    for (int a = 0; a <= kv.degree(); ++a) {
                        int ia = span - kv.degree() + a;
                        R(ia, 0) += wq * N(0, a) * u.x();
                        R(ia, 1) += wq * N(0, a) * u.y();
                        for (int b = 0; b <= kv.degree(); ++b) M(ia, span - kv.degree() + b) += wq * N(0, a) * N(0, b);
                    }
                }
            }
            Eigen::MatrixXd c = M.ldlt().solve(R);
            for (int a = 0; a < nb; ++a) {
                int idx;
                switch (f) {
                case face_bottom: idx = a; break;
                case face_top: idx = (V.nv() - 1) * V.nu() + a; break;
                case face_left: idx = a * V.nu(); break;
                default: idx = a * V.nu() + V.nu() - 1; break;
                }
                int gx = dm.ux(p, idx), gy = dm.uy(p, idx);
                if (dm.dirichlet[gx]) continue; // corner already set by the neighbouring face
                dm.dirichlet[gx] = dm.dirichlet[gy] = 1;
                dm.prescribed[gx] = c(a, 0);
                dm.prescribed[gy] = c(a, 1);
            }
        }
    }
    finalize_dofmap(dm);
}

Eigen::VectorXd StokesSystem::expand(const Eigen::VectorXd& x) const
{
    Eigen::VectorXd u = dofs.prescribed;
    for (int g = 0; g < dofs.size(); ++g)
        if (dofs.free_index[g] >= 0) u[g] = x[dofs.free_index[g]];
    return u;
}

StokesSystem assemble_system(const PatchHierarchy& h, const ExactSolution& ex, const AssemblyConfig& cfg,
                             const StabOperators* stab)
{
    StokesSystem S;
    S.dofs = build_dofmap(h, stab != nullptr && stab->options().enabled);
    apply_dirichlet(h, S.dofs, ex);
    S.full = assemble_volume(h, S.dofs, stab, cfg.extra_quadrature) + assemble_interface(h, S.dofs, cfg, stab);
    S.full_rhs = assemble_rhs(h, S.dofs, ex, cfg.extra_quadrature);

    const DofMap& dm = S.dofs;
    Eigen::VectorXd b = S.full_rhs - S.full * dm.prescribed;
    const int nf = dm.num_free;
    S.mean_constraint = cfg.mean_zero_pressure;
    const int n = nf + (S.mean_constraint ? 1 : 0);
    std::vector<Triplet> trips;
    trips.reserve(S.full.nonZeros());
    for (int c = 0; c < S.full.outerSize(); ++c) {
        int fc = dm.free_index[c];
        if (fc < 0) continue;
        for (SpMat::InnerIterator it(S.full, c); it; ++it) {
            int fr = dm.free_index[it.row()];
            if (fr >= 0) trips.emplace_back(fr, fc, it.value());
        }
    }
    S.rhs = Eigen::VectorXd::Zero(n);
    for (int g = 0; g < dm.size(); ++g)
        if (dm.free_index[g] >= 0) S.rhs[dm.free_index[g]] = b[g];
    if (S.mean_constraint) {
        // single multiplier row: integral of the pressure vanishes
        Eigen::VectorXd m = Eigen::VectorXd::Zero(dm.size());
        for (int p = 0; p < h.num_patches(); ++p)
            for (int e = 0; e < static_cast<int>(h.patch(p).elements.size()); ++e) {
                if (!h.patch(p).elements[e].active) continue;
                auto qp = h.element_quadrature(p, e, vol_tensor(h, p, 0), vol_tri(h, p, 0));
                PointBasis Q = stab_basis(h, stab, p, e, Field::pressure, xis_of(qp), xs_of(qp));
                for (std::size_t q = 0; q < qp.size(); ++q)
                    for (std::size_t a = 0; a < Q.dofs.size(); ++a) m[dm.pr(Q.patch, Q.dofs[a])] += qp[q].w * Q.val(q, a);
            }
        for (int g = 0; g < dm.size(); ++g)
            if (dm.free_index[g] >= 0 && m[g] != 0.0) {
                trips.emplace_back(nf, dm.free_index[g], m[g]);
                trips.emplace_back(dm.free_index[g], nf, m[g]);
            }
    }
    S.matrix.resize(n, n);
    S.matrix.setFromTriplets(trips.begin(), trips.end());
    S.matrix.makeCompressed();
    return S;
}

DiscreteField to_field(const PatchHierarchy& h, const DofMap& dm, const Eigen::VectorXd& full)
{
    DiscreteField f = DiscreteField::zeros(h);
    for (int p = 0; p < h.num_patches(); ++p) {
        for (int a = 0; a < dm.nv[p]; ++a) {
            f.ux[p][a] = full[dm.ux(p, a)];
            f.uy[p][a] = full[dm.uy(p, a)];
        }
        for (int a = 0; a < dm.np[p]; ++a) f.p[p][a] = full[dm.pr(p, a)];
    }
    return f;
}

namespace {

double dot_dofs(const Eigen::MatrixXd& m, int row, const std::vector<int>& dofs, const Eigen::VectorXd& c)
{
    double s = 0.0;
    for (std::size_t a = 0; a < dofs.size(); ++a) s += m(row, static_cast<long>(a)) * c[dofs[a]];
    return s;
}

} // namespace

ErrorReport errors_vs_exact(const PatchHierarchy& h, const StabOperators* stab, const DiscreteField& f,
                            const ExactSolution* exact, int extra)
{
    double e1 = 0.0, eu = 0.0, ep = 0.0;
    for (int p = 0; p < h.num_patches(); ++p) {
        const auto& P = h.patch(p);
        const int k = P.th.k;
        for (int e = 0; e < static_cast<int>(P.elements.size()); ++e) {
            if (!P.elements[e].active) continue;
            auto qp = h.element_quadrature(p, e, k + 5 + extra, k + 5 + extra);
            auto xis = xis_of(qp);
            PointBasis V = native_basis(h, p, e, Field::velocity, xis);
            PointBasis Q = stab_basis(h, stab, p, e, Field::pressure, xis, xs_of(qp));
            for (int q = 0; q < static_cast<int>(qp.size()); ++q) {
                Vec2 uh(dot_dofs(V.val, q, V.dofs, f.ux[p]), dot_dofs(V.val, q, V.dofs, f.uy[p]));
                Mat2 Dh;
                Dh << dot_dofs(V.gx, q, V.dofs, f.ux[p]), dot_dofs(V.gy, q, V.dofs, f.ux[p]),
                    dot_dofs(V.gx, q, V.dofs, f.uy[p]), dot_dofs(V.gy, q, V.dofs, f.uy[p]);
                double ph = dot_dofs(Q.val, q, Q.dofs, f.p[Q.patch]);
                Vec2 u = exact ? exact->u(qp[q].x) : Vec2::Zero();
                Mat2 D = exact ? exact->grad_u(qp[q].x) : Mat2::Zero();
                double pe = exact ? exact->p(qp[q].x) : 0.0;
                const double w = qp[q].w;
                eu += w * (u - uh).squaredNorm();
                e1 += w * (D - Dh).squaredNorm();
                ep += w * (pe - ph) * (pe - ph);
            }
        }
    }
    double ju = 0.0, jp = 0.0;
    std::map<std::pair<int, int>, double> pair_jump;
    for (const auto& s : h.interfaces()) {
        const int k = h.patch(s.i).th.k;
        auto sp = h.segment_quadrature(s, k + 4 + extra);
        std::vector<Vec2> xi_i, xi_j, xs;
        for (const auto& q : sp) {
            xi_i.push_back(q.xi_i);
            xi_j.push_back(q.xi_j);
            xs.push_back(q.x);
        }
        PointBasis Vi = native_basis(h, s.i, s.elem_i, Field::velocity, xi_i);
        PointBasis Vj = native_basis(h, s.j, s.elem_j, Field::velocity, xi_j);
        PointBasis Pi = stab_basis(h, stab, s.i, s.elem_i, Field::pressure, xi_i, xs);
        PointBasis Pj = stab_basis(h, stab, s.j, s.elem_j, Field::pressure, xi_j, xs);
        double seg_p = 0.0;
        for (int q = 0; q < static_cast<int>(sp.size()); ++q) {
            Vec2 jump(dot_dofs(Vi.val, q, Vi.dofs, f.ux[s.i]) - dot_dofs(Vj.val, q, Vj.dofs, f.ux[s.j]),
                      dot_dofs(Vi.val, q, Vi.dofs, f.uy[s.i]) - dot_dofs(Vj.val, q, Vj.dofs, f.uy[s.j]));
            double pj = dot_dofs(Pi.val, q, Pi.dofs, f.p[Pi.patch]) - dot_dofs(Pj.val, q, Pj.dofs, f.p[Pj.patch]);
            ju += sp[q].w * jump.squaredNorm() / s.h_i;
            seg_p += sp[q].w * s.h_i * pj * pj;
        }
        jp += seg_p;
        pair_jump[{s.i, s.j}] += seg_p;
    }
    ErrorReport r;
    r.energy = std::sqrt(e1 + ju);
    r.l2_u = std::sqrt(eu);
    r.pressure = std::sqrt(ep + jp);
    r.l2_p = std::sqrt(ep);
    for (const auto& [key, v] : pair_jump) r.p_jump += std::sqrt(v);
    return r;
}

double energy_norm(const PatchHierarchy& h, const DiscreteField& f) { return errors_vs_exact(h, nullptr, f, nullptr).energy; }

double pressure_norm(const PatchHierarchy& h, const StabOperators* stab, const DiscreteField& f)
{
    return errors_vs_exact(h, stab, f, nullptr).pressure;
}

double interface_pressure_jump(const PatchHierarchy& h, const StabOperators* stab, const DiscreteField& f)
{
    return errors_vs_exact(h, stab, f, nullptr).p_jump;
}

} // namespace ovs
