#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace ovs {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>; // counter-clockwise, no repeated closing vertex

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Polygon& p);
double polygon_area(const Polygon& p);
Vec2 polygon_centroid(const Polygon& p);
double polygon_diameter(const Polygon& p);
Eigen::AlignedBox2d polygon_bbox(const Polygon& p);
bool is_convex(const Polygon& p, double tol);
// merge vertices closer than tol and drop vertices collinear with their neighbours
Polygon simplify(const Polygon& p, double tol);
// self-intersection test for a closed polyline
bool is_simple(const Polygon& p, double tol);

// part of p on the left of the directed line a->b; vertices within tol of the line count as inside
Polygon clip_halfplane(const Polygon& p, const Vec2& a, const Vec2& b, double tol);
// both convex
Polygon intersect_convex(const Polygon& p, const Polygon& c, double tol);
// p \ c for convex p and c, as disjoint convex pieces
std::vector<Polygon> subtract_convex(const Polygon& p, const Polygon& c, double tol);
// ear clipping into triangles
std::vector<Polygon> ear_clip(const Polygon& p, double tol);
// the polygon itself if convex, else its triangles
std::vector<Polygon> convex_parts(const Polygon& p, double tol);
// pieces minus the union of cutters (all convex); pieces thinner than tol are dropped
std::vector<Polygon> subtract_all(const std::vector<Polygon>& pieces, const std::vector<Polygon>& cutters, double tol);
// fan triangulation of a convex polygon
std::vector<std::array<Vec2, 3>> fan_triangulate(const Polygon& p);

// 1 inside, 0 on the boundary (within tol), -1 outside
int point_in_polygon(const Vec2& x, const Polygon& p, double tol);
double point_segment_distance(const Vec2& x, const Vec2& a, const Vec2& b);
double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);
// set distance between two closed polygonal regions (0 when they overlap or touch)
double polygon_distance(const Polygon& p, const Polygon& q, double tol);
// parameters t in [0,1] along a->b where it meets c->d (an overlap contributes its end parameters)
std::vector<double> segment_hits(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double tol);
// sub-intervals of [0,1] of the segment a->b lying inside convex c (closed, with tolerance)
bool segment_in_convex(const Vec2& a, const Vec2& b, const Polygon& c, double tol, double& t0, double& t1);

} // namespace ovs
