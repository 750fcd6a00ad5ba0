#include "ovstokes/union_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ovstokes/errors.hpp"
#include "ovstokes/quadrature.hpp"

namespace ovs {

namespace {

Vec2 face_point(int face, double t)
{
    switch (face) {
    case face_bottom: return {t, 0.0};
    case face_right: return {1.0, t};
    case face_top: return {1.0 - t, 1.0};
    default: return {0.0, 1.0 - t};
    }
}

// parametric polyline u(t) for t in [t0,t1] mapped and chord-subdivided; appends all but the end point
void append_curve(const GeometryMap& g, const Vec2& p0, const Vec2& p1, double tol, int depth, Polygon& out)
{
    Vec2 x0 = g.eval_raw(p0).x, x1 = g.eval_raw(p1).x;
    Vec2 pm = 0.5 * (p0 + p1);
    Vec2 xm = g.eval_raw(pm).x;
    Vec2 q1 = g.eval_raw(0.75 * p0 + 0.25 * p1).x, q3 = g.eval_raw(0.25 * p0 + 0.75 * p1).x;
    double dev = std::max({point_segment_distance(xm, x0, x1), point_segment_distance(q1, x0, x1),
                           point_segment_distance(q3, x0, x1)});
    if (dev <= tol || depth >= 14) {
        out.push_back(x0);
        return;
    }
    append_curve(g, p0, pm, tol, depth + 1, out);
    append_curve(g, pm, p1, tol, depth + 1, out);
}

bool boxes_overlap(const Eigen::AlignedBox2d& a, const Eigen::AlignedBox2d& b, double tol)
{
    return a.min().x() <= b.max().x() + tol && b.min().x() <= a.max().x() + tol && a.min().y() <= b.max().y() + tol &&
           b.min().y() <= a.max().y() + tol;
}

} // namespace

bool classify_good(double rho, double theta)
{
    if (!(theta > 0.0 && theta <= 1.0)) throw ParameterError("theta must lie in (0,1]");
    return rho >= theta;
}

PatchHierarchy::PatchHierarchy(std::vector<PatchInput> inputs, GeometryOptions opt) : opt_(opt)
{
    if (inputs.empty()) throw ConfigurationError("hierarchy needs at least one patch");
    if (!(opt_.theta > 0.0 && opt_.theta <= 1.0)) throw ParameterError("theta must lie in (0,1]");
    Eigen::AlignedBox2d all;
    for (auto& in : inputs) {
        Patch P;
        P.geo = std::move(in.geometry);
        P.th = std::move(in.th);
        P.bc = in.bc;
        for (const auto& c : P.geo.control_points()) all.extend(c);
        // the geometry must be polynomial on every analysis element
        const auto& gs = P.geo.space();
        for (int dir = 0; dir < 2; ++dir) {
            auto gb = (dir == 0 ? gs.knots_u() : gs.knots_v()).breakpoints();
            auto mb = (dir == 0 ? P.th.pressure.knots_u() : P.th.pressure.knots_v()).breakpoints();
            for (double b : gb)
                if (!std::binary_search(mb.begin(), mb.end(), b))
                    throw GeometryError("geometry breakpoints must be analysis breakpoints");
        }
        patches_.push_back(std::move(P));
    }
    diam_ = all.diagonal().norm();
    snap_ = opt_.snap_tol * diam_;
    for (auto& P : patches_) build_footprint(P);

    // area of the union, computed on footprints alone
    union_area_ = 0.0;
    for (int i = 0; i < num_patches(); ++i) {
        std::vector<Polygon> vis = patches_[i].footprint_parts;
        for (int l = i + 1; l < num_patches(); ++l) vis = subtract_all(vis, patches_[l].footprint_parts, snap_);
        for (const auto& p : vis) union_area_ += polygon_area(p);
    }

    for (int i = 0; i < num_patches(); ++i) build_elements(i);
    build_interfaces();
    reclassify(opt_.theta);
}

void PatchHierarchy::build_footprint(Patch& P) const
{
    const double tol = opt_.chord_tol * diam_;
    auto bu = P.th.pressure.knots_u().breakpoints();
    auto bv = P.th.pressure.knots_v().breakpoints();
    P.footprint.clear();
    P.footprint_face.clear();
    for (int f = 0; f < 4; ++f) {
        const auto& br = (f == face_bottom || f == face_top) ? bu : bv;
        std::vector<double> ts;
        if (f == face_bottom || f == face_right)
            ts = br;
        else
            for (auto it = br.rbegin(); it != br.rend(); ++it) ts.push_back(1.0 - *it);
        for (std::size_t q = 0; q + 1 < ts.size(); ++q) {
            std::size_t before = P.footprint.size();
            append_curve(P.geo, face_point(f, ts[q]), face_point(f, ts[q + 1]), tol, 0, P.footprint);
            for (std::size_t r = before; r < P.footprint.size(); ++r) P.footprint_face.push_back(f);
        }
    }
    if (signed_area(P.footprint) <= 0.0) throw GeometryError("footprint is not positively oriented");
    if (!is_simple(P.footprint, snap_)) throw GeometryError("self-intersecting footprint");
    P.bbox = polygon_bbox(P.footprint);
    P.footprint_parts = convex_parts(simplify(P.footprint, snap_), snap_);
}

void PatchHierarchy::build_elements(int i)
{
    Patch& P = patches_[i];
    const auto& mesh = P.mesh();
    const double tol = opt_.chord_tol * diam_;
    P.elements.assign(mesh.num_elements(), ElementInfo{});
    const int ng = P.geo.space().degree() + 2;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        ElementInfo& K = P.elements[e];
        auto bx = mesh.element_box(e);
        Vec2 c[4] = {{bx.u0, bx.v0}, {bx.u1, bx.v0}, {bx.u1, bx.v1}, {bx.u0, bx.v1}};
        for (int s = 0; s < 4; ++s) append_curve(P.geo, c[s], c[(s + 1) % 4], tol, 0, K.outline);
        K.area = 0.0;
        for (const auto& q : full_element_quadrature(i, e, ng)) K.area += q.w;
        K.h = polygon_diameter(K.outline);
        K.centroid = polygon_centroid(K.outline);
        auto kb = polygon_bbox(K.outline);
        std::vector<Polygon> cutters;
        for (int l = i + 1; l < num_patches(); ++l) {
            if (!boxes_overlap(kb, patches_[l].bbox, snap_)) continue;
            for (const auto& part : patches_[l].footprint_parts)
                if (boxes_overlap(kb, polygon_bbox(part), snap_)) cutters.push_back(part);
        }
        K.rho = 1.0;
        if (!cutters.empty()) {
            auto vis = subtract_all(convex_parts(K.outline, snap_), cutters, snap_);
            double a = 0.0;
            for (const auto& p : vis) a += polygon_area(p);
            double full = polygon_area(K.outline);
            if (a >= (1.0 - 1e-12) * full) {
                K.rho = 1.0;
            } else if (a < 1e-14 * full) {
                K.rho = 0.0;
            } else {
                K.rho = a / full;
                // drop degenerate pieces
                for (auto& p : vis)
                    if (polygon_area(p) >= 1e-14 * full) K.visible.push_back(std::move(p));
            }
        }
        K.active = K.rho > 0.0;
        K.cut = K.active && K.rho < 1.0;
    }
}

Vec2 PatchHierarchy::to_parametric(int p, int e, const Vec2& x) const
{
    const Patch& P = patches_[p];
    auto bx = P.mesh().element_box(e);
    Vec2 guess(0.5 * (bx.u0 + bx.u1), 0.5 * (bx.v0 + bx.v1));
    Vec2 xi;
    if (!P.geo.inverse(x, guess, xi)) {
        // retry from the element corners
        Vec2 corners[4] = {{bx.u0, bx.v0}, {bx.u1, bx.v0}, {bx.u1, bx.v1}, {bx.u0, bx.v1}};
        for (const auto& g : corners)
            if (P.geo.inverse(x, g, xi)) return xi;
        std::ostringstream os;
        os << "inverse map failed for point (" << x.x() << "," << x.y() << ") in patch " << p;
        throw GeometryError(os.str());
    }
    return xi;
}

std::vector<QuadPoint> PatchHierarchy::full_element_quadrature(int p, int e, int n) const
{
    const Patch& P = patches_[p];
    auto bx = P.mesh().element_box(e);
    Rule2D r = gauss_square(n);
    std::vector<QuadPoint> out;
    out.reserve(r.x.size());
    const double du = bx.u1 - bx.u0, dv = bx.v1 - bx.v0;
    for (std::size_t q = 0; q < r.x.size(); ++q) {
        Vec2 xi(bx.u0 + du * r.x[q].x(), bx.v0 + dv * r.x[q].y());
        GeoEval g = eval_geometry(P.geo, xi);
        out.push_back({xi, g.x, r.w[q] * du * dv * g.det});
    }
    return out;
}

std::vector<QuadPoint> PatchHierarchy::element_quadrature(int p, int e, int n_tensor, int n_tri) const
{
    const ElementInfo& K = patches_[p].elements[e];
    if (!K.active) return {};
    if (!K.cut) return full_element_quadrature(p, e, n_tensor);
    std::vector<QuadPoint> out;
    for (const auto& piece : K.visible)
        for (const auto& t : fan_triangulate(piece)) {
            Rule2D r = gauss_triangle(t[0], t[1], t[2], n_tri);
            for (std::size_t q = 0; q < r.x.size(); ++q) out.push_back({to_parametric(p, e, r.x[q]), r.x[q], r.w[q]});
        }
    return out;
}

std::vector<SegmentPoint> PatchHierarchy::segment_quadrature(const InterfaceSegment& s, int n) const
{
    Rule1D g = gauss_legendre(n);
    std::vector<SegmentPoint> out;
    const double L = s.length();
    for (int q = 0; q < n; ++q) {
        SegmentPoint sp;
        sp.x = s.a + g.x[q] * (s.b - s.a);
        sp.w = g.w[q] * L;
        sp.xi_i = to_parametric(s.i, s.elem_i, sp.x);
        sp.xi_j = s.j >= 0 ? to_parametric(s.j, s.elem_j, sp.x) : Vec2(0.0, 0.0);
        out.push_back(sp);
    }
    return out;
}

void PatchHierarchy::build_interfaces()
{
    interfaces_.clear();
    boundary_.clear();
    const int N = num_patches();
    // physical mesh edges of every patch, used as split lines
    std::vector<std::vector<std::array<Vec2, 2>>> edges(N);
    for (int j = 0; j < N; ++j)
        for (const auto& K : patches_[j].elements)
            for (std::size_t s = 0; s < K.outline.size(); ++s)
                edges[j].push_back({K.outline[s], K.outline[(s + 1) % K.outline.size()]});
    for (int j = 0; j < N; ++j) {
        const auto& F = patches_[j].footprint;
        for (std::size_t s = 0; s < F.size(); ++s) edges[j].push_back({F[s], F[(s + 1) % F.size()]});
    }

    auto locate = [&](int p, const Vec2& x, int& elem, Vec2& xi) -> bool {
        const Patch& P = patches_[p];
        int best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (int e = 0; e < static_cast<int>(P.elements.size()); ++e) {
            double d = (P.elements[e].centroid - x).squaredNorm();
            if (d < bd) {
                bd = d;
                best = e;
            }
        }
        auto bx = P.mesh().element_box(best);
        if (!P.geo.inverse(x, Vec2(0.5 * (bx.u0 + bx.u1), 0.5 * (bx.v0 + bx.v1)), xi)) {
            if (!P.geo.inverse(x, Vec2(0.5, 0.5), xi)) return false;
        }
        elem = P.mesh().find_element(xi);
        return true;
    };

    double ratio = 1.0;
    for (int i = 0; i < N; ++i) {
        const Patch& P = patches_[i];
        const auto& F = P.footprint;
        for (std::size_t s = 0; s < F.size(); ++s) {
            const Vec2 a = F[s], b = F[(s + 1) % F.size()];
            const double L = (b - a).norm();
            if (L <= snap_) continue;
            Eigen::AlignedBox2d eb;
            eb.extend(a);
            eb.extend(b);
            // parameter intervals not covered by upper footprints
            std::vector<std::pair<double, double>> keep = {{0.0, 1.0}};
            for (int l = i + 1; l < N && !keep.empty(); ++l) {
                if (!boxes_overlap(eb, patches_[l].bbox, snap_)) continue;
                for (const auto& C : patches_[l].footprint_parts) {
                    double t0, t1;
                    if (!segment_in_convex(a, b, C, snap_, t0, t1)) continue;
                    std::vector<std::pair<double, double>> next;
                    for (auto [u0, u1] : keep) {
                        if (t1 <= u0 || t0 >= u1) {
                            next.push_back({u0, u1});
                            continue;
                        }
                        if (t0 > u0) next.push_back({u0, t0});
                        if (t1 < u1) next.push_back({t1, u1});
                    }
                    keep.swap(next);
                }
            }
            if (keep.empty()) continue;
            // split parameters from lower meshes and footprints
            std::vector<double> cuts;
            for (int j = 0; j < i; ++j) {
                if (!boxes_overlap(eb, patches_[j].bbox, snap_)) continue;
                for (const auto& ed : edges[j]) {
                    Eigen::AlignedBox2d bb;
                    bb.extend(ed[0]);
                    bb.extend(ed[1]);
                    if (!boxes_overlap(eb, bb, snap_)) continue;
                    for (double t : segment_hits(a, b, ed[0], ed[1], snap_)) cuts.push_back(t);
                }
            }
            for (auto [u0, u1] : keep) {
                std::vector<double> ts = {u0, u1};
                for (double t : cuts)
                    if (t > u0 && t < u1) ts.push_back(t);
                std::sort(ts.begin(), ts.end());
                for (std::size_t q = 0; q + 1 < ts.size(); ++q) {
                    double len = (ts[q + 1] - ts[q]) * L;
                    if (len <= 10.0 * snap_) continue;
                    InterfaceSegment seg;
                    seg.i = i;
                    seg.face = P.footprint_face[s];
                    seg.a = a + ts[q] * (b - a);
                    seg.b = a + ts[q + 1] * (b - a);
                    Vec2 d = (b - a) / L;
                    seg.normal = Vec2(d.y(), -d.x());
                    Vec2 m = 0.5 * (seg.a + seg.b);
                    double delta = std::min(1e-3 * len, 1e-7 * diam_);
                    Vec2 in = m - delta * seg.normal, out = m + delta * seg.normal;
                    Vec2 xi;
                    if (!locate(i, in, seg.elem_i, xi)) throw GeometryError("cannot locate interface segment in its patch");
                    seg.h_i = P.elements[seg.elem_i].h;
                    for (int j = i - 1; j >= 0; --j) {
                        if (point_in_polygon(out, patches_[j].footprint, 0.0) > 0) {
                            seg.j = j;
                            break;
                        }
                    }
                    if (seg.j < 0) {
                        boundary_.push_back(seg);
                        continue;
                    }
                    if (!locate(seg.j, out, seg.elem_j, xi)) throw GeometryError("cannot locate interface segment in lower patch");
                    const ElementInfo& Kj = patches_[seg.j].elements[seg.elem_j];
                    if (!Kj.active) continue;
                    seg.h_j = Kj.h;
                    ratio = std::max(ratio, std::max(seg.h_i / seg.h_j, seg.h_j / seg.h_i));
                    interfaces_.push_back(seg);
                }
            }
        }
    }
    max_mesh_ratio_ = ratio;
}

void PatchHierarchy::reclassify(double theta)
{
    if (!(theta > 0.0 && theta <= 1.0)) throw ParameterError("theta must lie in (0,1]");
    opt_.theta = theta;
    for (auto& P : patches_)
        for (auto& K : P.elements) {
            K.good = K.active && classify_good(K.rho, theta);
            K.donor_patch = K.donor_elem = -1;
            K.donor_C = 0.0;
        }
    if (!opt_.find_neighbors) return;
    for (int i = 0; i < num_patches(); ++i)
        for (int e = 0; e < static_cast<int>(patches_[i].elements.size()); ++e) {
            ElementInfo& K = patches_[i].elements[e];
            if (!K.active || K.good) continue;
            NeighborChoice c = find_good_neighbor(*this, i, e);
            K.donor_patch = c.patch;
            K.donor_elem = c.elem;
            K.donor_C = c.C;
        }
}

NeighborChoice find_good_neighbor(const PatchHierarchy& h, int i, int e)
{
    const auto& K = h.patch(i).elements[e];
    double C = h.options().neighbor_c;
    const double tie = 1e-12 * h.diameter();
    const Eigen::AlignedBox2d kb = polygon_bbox(K.outline);
    for (int r = 0; r <= h.options().max_relaxations; ++r, C *= 2.0) {
        const double reach = C * K.h;
        for (int k = i; k < h.num_patches(); ++k) {
            const auto& P = h.patch(k);
            int best = -1;
            double bd = std::numeric_limits<double>::infinity();
            for (int c = 0; c < static_cast<int>(P.elements.size()); ++c) {
                if (k == i && c == e) continue;
                const auto& Kc = P.elements[c];
                if (!Kc.good) continue;
                if (!boxes_overlap(kb, polygon_bbox(Kc.outline), reach)) continue;
                if (polygon_distance(K.outline, Kc.outline, h.snap()) > reach) continue;
                double d = (Kc.centroid - K.centroid).norm();
                if (d < bd - tie) {
                    bd = d;
                    best = c;
                }
            }
            if (best >= 0) return {k, best, C};
        }
    }
    std::ostringstream os;
    os << "no good neighbor for bad element " << e << " of patch " << i << " after "
       << h.options().max_relaxations << " relaxations";
    throw ConfigurationError(os.str());
}

int PatchHierarchy::num_bad() const
{
    int n = 0;
    for (const auto& P : patches_)
        for (const auto& K : P.elements)
            if (K.active && !K.good) ++n;
    return n;
}

double PatchHierarchy::min_active_rho() const
{
    double r = 1.0;
    for (const auto& P : patches_)
        for (const auto& K : P.elements)
            if (K.active) r = std::min(r, K.rho);
    return r;
}

double PatchHierarchy::visible_area() const
{
    double a = 0.0;
    for (const auto& P : patches_)
        for (const auto& K : P.elements)
            if (K.active) a += K.rho * K.area;
    return a;
}

OverlapDiagnostics PatchHierarchy::overlap_diagnostics() const
{
    const int N = num_patches();
    OverlapDiagnostics d;
    d.delta.assign(N, std::vector<int>(N, 0));
    d.eta.assign(N, std::vector<int>(N, 0));
    for (const auto& s : interfaces_) d.delta[s.i][s.j] = 1;
    const double amin = 1e-12 * diam_ * diam_;
    for (int i = 1; i < N; ++i) {
        const Patch& P = patches_[i];
        for (int j = 0; j < i; ++j) {
            if (!boxes_overlap(P.bbox, patches_[j].bbox, -snap_)) continue;
            double a = 0.0;
            for (const auto& K : P.elements) {
                if (!K.active) continue;
                std::vector<Polygon> pieces = K.cut ? K.visible : convex_parts(K.outline, snap_);
                for (const auto& pc : pieces)
                    for (const auto& C : patches_[j].footprint_parts) a += polygon_area(intersect_convex(pc, C, snap_));
                if (a > amin) break;
            }
            d.eta[i][j] = a > amin ? 1 : 0;
        }
    }
    for (int i = 1; i < N; ++i) {
        int sd = 0, so = 0;
        for (int j = 0; j < i; ++j) {
            sd += d.delta[i][j];
            so += d.eta[i][j];
        }
        d.n_gamma_down = std::max(d.n_gamma_down, sd);
        d.n_overlap = std::max(d.n_overlap, so);
    }
    for (int j = 0; j + 1 < N; ++j) {
        int su = 0;
        for (int i = j + 1; i < N; ++i) su += d.delta[i][j];
        d.n_gamma_up = std::max(d.n_gamma_up, su);
    }
    d.n_gamma = std::max(d.n_gamma_down, d.n_gamma_up);
    return d;
}

void PatchHierarchy::dump(std::ostream& os) const
{
    using nlohmann::json;
    auto poly = [](const Polygon& p) {
        json a = json::array();
        for (const auto& v : p) a.push_back({v.x(), v.y()});
        return a;
    };
    auto diag = overlap_diagnostics();
    os << json{{"type", "hierarchy"},
               {"patches", num_patches()},
               {"theta", opt_.theta},
               {"union_area", union_area_},
               {"visible_area", visible_area()},
               {"n_bad", num_bad()},
               {"N_gamma_down", diag.n_gamma_down},
               {"N_gamma_up", diag.n_gamma_up},
               {"N_gamma", diag.n_gamma},
               {"N_O", diag.n_overlap},
               {"max_mesh_ratio", max_mesh_ratio_}}
              .dump()
       << "\n";
    for (int i = 0; i < num_patches(); ++i) {
        const Patch& P = patches_[i];
        os << json{{"type", "patch"},
                   {"patch", i},
                   {"k", P.th.k},
                   {"alpha", P.th.alpha},
                   {"elements", {P.mesh().nex(), P.mesh().ney()}},
                   {"footprint", poly(P.footprint)}}
                  .dump()
           << "\n";
        for (int e = 0; e < static_cast<int>(P.elements.size()); ++e) {
            const auto& K = P.elements[e];
            json vis = json::array();
            for (const auto& v : K.visible) vis.push_back(poly(v));
            json j = {{"type", "element"}, {"patch", i},        {"element", e},     {"rho", K.rho},
                      {"active", K.active}, {"cut", K.cut},     {"good", K.good},   {"h", K.h},
                      {"outline", poly(K.outline)}, {"visible", vis}};
            if (K.donor_patch >= 0) j["donor"] = {K.donor_patch, K.donor_elem};
            os << j.dump() << "\n";
        }
    }
    auto seg = [&](const InterfaceSegment& s, const char* type) {
        os << json{{"type", type},
                   {"i", s.i},
                   {"j", s.j},
                   {"face", s.face},
                   {"a", {s.a.x(), s.a.y()}},
                   {"b", {s.b.x(), s.b.y()}},
                   {"normal", {s.normal.x(), s.normal.y()}},
                   {"elem_i", s.elem_i},
                   {"elem_j", s.elem_j},
                   {"h_i", s.h_i},
                   {"h_j", s.h_j}}
                  .dump()
           << "\n";
    };
    for (const auto& s : interfaces_) seg(s, "interface");
    for (const auto& s : boundary_) seg(s, "boundary");
}

} // namespace ovs
