#include "ovstokes/polygon.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace ovs {

double signed_area(const Polygon& p)
{
    const std::size_t n = p.size();
    if (n < 3) return 0.0;
    // shifted to the first vertex to limit cancellation
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) s += cross(p[i] - p[0], p[i + 1] - p[0]);
    return 0.5 * s;
}

double polygon_area(const Polygon& p) { return std::abs(signed_area(p)); }

Vec2 polygon_centroid(const Polygon& p)
{
    const std::size_t n = p.size();
    Vec2 c = Vec2::Zero();
    double a = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        Vec2 u = p[i] - p[0], v = p[i + 1] - p[0];
        double t = 0.5 * cross(u, v);
        c += t * (u + v) / 3.0;
        a += t;
    }
    if (a == 0.0) {
        for (const auto& q : p) c += q;
        return c / static_cast<double>(std::max<std::size_t>(n, 1));
    }
    return p[0] + c / a;
}

double polygon_diameter(const Polygon& p)
{
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) d = std::max(d, (p[i] - p[j]).norm());
    return d;
}

Eigen::AlignedBox2d polygon_bbox(const Polygon& p)
{
    Eigen::AlignedBox2d b;
    for (const auto& q : p) b.extend(q);
    return b;
}

bool is_convex(const Polygon& p, double tol)
{
    const std::size_t n = p.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = p[i];
        const Vec2& b = p[(i + 1) % n];
        Vec2 e = b - a;
        double len = e.norm();
        if (len == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j)
            if (cross(e, p[j] - a) / len < -tol) return false;
    }
    return true;
}

Polygon simplify(const Polygon& p, double tol)
{
    Polygon q;
    for (const auto& v : p)
        if (q.empty() || (v - q.back()).norm() > tol) q.push_back(v);
    while (q.size() > 1 && (q.front() - q.back()).norm() <= tol) q.pop_back();
    bool changed = true;
    while (changed && q.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const Vec2& a = q[(i + q.size() - 1) % q.size()];
            const Vec2& b = q[i];
            const Vec2& c = q[(i + 1) % q.size()];
            double len = (c - a).norm();
            if (len == 0.0 || std::abs(cross(c - a, b - a)) / len <= tol) {
                // b lies on the chord a-c (only drop it when it is between a and c)
                double t = len == 0.0 ? 0.5 : (b - a).dot(c - a) / (len * len);
                if (t >= 0.0 && t <= 1.0) {
                    q.erase(q.begin() + static_cast<long>(i));
                    changed = true;
                    break;
                }
            }
        }
    }
    return q;
}

namespace {

bool proper_or_touch(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double tol)
{
    return segment_segment_distance(a, b, c, d) <= tol;
}

} // namespace

bool is_simple(const Polygon& p, double tol)
{
    const std::size_t n = p.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = p[i];
        const Vec2& b = p[(i + 1) % n];
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue; // adjacent through the closing edge
            const Vec2& c = p[j];
            const Vec2& d = p[(j + 1) % n];
            if (proper_or_touch(a, b, c, d, tol)) return false;
        }
    }
    return true;
}

Polygon clip_halfplane(const Polygon& p, const Vec2& a, const Vec2& b, double tol)
{
    const std::size_t n = p.size();
    Polygon out;
    if (n == 0) return out;
    Vec2 e = b - a;
    double len = e.norm();
    if (len == 0.0) return p;
    const Vec2 nl = Vec2(-e.y(), e.x()) / len; // left normal
    std::vector<double> d(n);
    std::vector<int> side(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = cross(e, p[i] - a) / len;
        side[i] = d[i] > tol ? 1 : (d[i] < -tol ? -1 : 0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = (i + 1) % n;
        if (side[i] > 0)
            out.push_back(p[i]);
        else if (side[i] == 0)
            out.push_back(p[i] - d[i] * nl); // snapped onto the line
        if (side[i] * side[j] < 0) {
            double t = d[i] / (d[i] - d[j]);
            Vec2 x = p[i] + t * (p[j] - p[i]);
            x -= (cross(e, x - a) / len) * nl;
            out.push_back(x);
        }
    }
    Polygon q;
    for (const auto& v : out)
        if (q.empty() || (v - q.back()).norm() > 0.0) q.push_back(v);
    while (q.size() > 1 && (q.front() - q.back()).norm() == 0.0) q.pop_back();
    if (q.size() < 3) q.clear();
    return q;
}

Polygon intersect_convex(const Polygon& p, const Polygon& c, double tol)
{
    Polygon r = p;
    for (std::size_t i = 0; i < c.size() && !r.empty(); ++i) r = clip_halfplane(r, c[i], c[(i + 1) % c.size()], tol);
    return r;
}

std::vector<Polygon> subtract_convex(const Polygon& p, const Polygon& c, double tol)
{
    std::vector<Polygon> pieces;
    // quick reject by bounding boxes
    auto bp = polygon_bbox(p), bc = polygon_bbox(c);
    if (bp.min().x() >= bc.max().x() - tol || bp.max().x() <= bc.min().x() + tol || bp.min().y() >= bc.max().y() - tol ||
        bp.max().y() <= bc.min().y() + tol) {
        pieces.push_back(p);
        return pieces;
    }
    Polygon rest = p;
    for (std::size_t i = 0; i < c.size() && !rest.empty(); ++i) {
        const Vec2& a = c[i];
        const Vec2& b = c[(i + 1) % c.size()];
        Polygon out = clip_halfplane(rest, b, a, tol);
        if (!out.empty() && polygon_area(out) > tol * polygon_diameter(out)) pieces.push_back(out);
        rest = clip_halfplane(rest, a, b, tol);
    }
    return pieces;
}

std::vector<Polygon> ear_clip(const Polygon& poly, double tol)
{
    std::vector<Polygon> tris;
    Polygon p = poly;
    if (signed_area(p) < 0.0) std::reverse(p.begin(), p.end());
    std::vector<std::size_t> idx(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) idx[i] = i;
    std::size_t guard = 0;
    while (idx.size() > 3 && guard < 10 * p.size() * p.size()) {
        ++guard;
        bool clipped = false;
        const std::size_t m = idx.size();
        for (std::size_t k = 0; k < m; ++k) {
            const Vec2& a = p[idx[(k + m - 1) % m]];
            const Vec2& b = p[idx[k]];
            const Vec2& c = p[idx[(k + 1) % m]];
            double cr = cross(b - a, c - b);
            if (cr <= 0.0) continue;
            bool empty = true;
            for (std::size_t r = 0; r < m && empty; ++r) {
                if (r == (k + m - 1) % m || r == k || r == (k + 1) % m) continue;
                const Vec2& x = p[idx[r]];
                if (cross(b - a, x - a) >= -tol && cross(c - b, x - b) >= -tol && cross(a - c, x - c) >= -tol) empty = false;
            }
            if (!empty) continue;
            tris.push_back({a, b, c});
            idx.erase(idx.begin() + static_cast<long>(k));
            clipped = true;
            break;
        }
        if (!clipped) {
            // degenerate remainder: drop a collinear vertex
            idx.erase(idx.begin());
        }
    }
    if (idx.size() == 3) {
        Polygon t = {p[idx[0]], p[idx[1]], p[idx[2]]};
        if (signed_area(t) > 0.0) tris.push_back(t);
    }
    return tris;
}

std::vector<Polygon> convex_parts(const Polygon& p, double tol)
{
    Polygon q = p;
    if (signed_area(q) < 0.0) std::reverse(q.begin(), q.end());
    if (is_convex(q, tol)) return {q};
    return ear_clip(q, tol);
}

std::vector<Polygon> subtract_all(const std::vector<Polygon>& pieces, const std::vector<Polygon>& cutters, double tol)
{
    std::vector<Polygon> cur = pieces;
    for (const auto& c : cutters) {
        std::vector<Polygon> next;
        for (const auto& p : cur) {
            auto s = subtract_convex(p, c, tol);
            next.insert(next.end(), s.begin(), s.end());
        }
        cur.swap(next);
        if (cur.empty()) break;
    }
    return cur;
}

std::vector<std::array<Vec2, 3>> fan_triangulate(const Polygon& p)
{
    std::vector<std::array<Vec2, 3>> t;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) t.push_back({p[0], p[i], p[i + 1]});
    return t;
}

double point_segment_distance(const Vec2& x, const Vec2& a, const Vec2& b)
{
    Vec2 e = b - a;
    double l2 = e.squaredNorm();
    double t = l2 == 0.0 ? 0.0 : std::clamp((x - a).dot(e) / l2, 0.0, 1.0);
    return (x - (a + t * e)).norm();
}

int point_in_polygon(const Vec2& x, const Polygon& p, double tol)
{
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i)
        if (point_segment_distance(x, p[i], p[(i + 1) % n]) <= tol) return 0;
    // winding number
    int w = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = p[i];
        const Vec2& b = p[(i + 1) % n];
        if (a.y() <= x.y()) {
            if (b.y() > x.y() && cross(b - a, x - a) > 0.0) ++w;
        } else {
            if (b.y() <= x.y() && cross(b - a, x - a) < 0.0) --w;
        }
    }
    return w != 0 ? 1 : -1;
}

double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d)
{
    double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                     point_segment_distance(d, a, b)});
}

double polygon_distance(const Polygon& p, const Polygon& q, double tol)
{
    if (!p.empty() && point_in_polygon(p[0], q, tol) >= 0) return 0.0;
    if (!q.empty() && point_in_polygon(q[0], p, tol) >= 0) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j)
            d = std::min(d, segment_segment_distance(p[i], p[(i + 1) % p.size()], q[j], q[(j + 1) % q.size()]));
    return d <= tol ? 0.0 : d;
}

std::vector<double> segment_hits(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double tol)
{
    std::vector<double> t;
    Vec2 r = b - a, s = d - c;
    double rl = r.norm();
    if (rl == 0.0) return t;
    double den = cross(r, s);
    double sl = s.norm();
    if (std::abs(den) <= 1e-14 * rl * sl) {
        // parallel: only collinear overlaps matter
        if (std::abs(cross(r, c - a)) / rl > tol) return t;
        for (const Vec2& x : {c, d}) {
            double u = (x - a).dot(r) / (rl * rl);
            if (u > 0.0 && u < 1.0) t.push_back(u);
        }
        return t;
    }
    double u = cross(c - a, s) / den;
    double v = cross(c - a, r) / den;
    double eu = tol / rl, ev = sl > 0.0 ? tol / sl : 0.0;
    if (u >= -eu && u <= 1.0 + eu && v >= -ev && v <= 1.0 + ev) t.push_back(std::clamp(u, 0.0, 1.0));
    return t;
}

bool segment_in_convex(const Vec2& a, const Vec2& b, const Polygon& c, double tol, double& t0, double& t1)
{
    t0 = 0.0;
    t1 = 1.0;
    Vec2 r = b - a;
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = c[i];
        const Vec2& q = c[(i + 1) % n];
        Vec2 e = q - p;
        double len = e.norm();
        if (len == 0.0) continue;
        // signed distance along the segment: f(t) = f0 + t*df, inside when f >= -tol
        double f0 = cross(e, a - p) / len;
        double df = cross(e, r) / len;
        if (std::abs(df) < 1e-300) {
            if (f0 < -tol) return false;
            continue;
        }
        double tc = (-tol - f0) / df;
        if (df > 0.0)
            t0 = std::max(t0, tc);
        else
            t1 = std::min(t1, tc);
        if (t0 > t1) return false;
    }
    return t1 > t0;
}

} // namespace ovs
