#pragma once

#include <array>
#include <ostream>
#include <vector>

#include "ovstokes/polygon.hpp"
#include "ovstokes/splines.hpp"

namespace ovs {

enum class BcKind { none, dirichlet, neumann };

// faces of the parametric square
enum Face { face_bottom = 0, face_right = 1, face_top = 2, face_left = 3 };

struct PatchInput {
    GeometryMap geometry;
    TaylorHoodPair th;
    std::array<BcKind, 4> bc{BcKind::none, BcKind::none, BcKind::none, BcKind::none};
};

struct ElementInfo {
    double area = 0.0;   // |K|
    double h = 0.0;      // full element diameter
    double rho = 0.0;    // |K cap Omega_i| / |K|
    bool active = false; // rho > 0
    bool cut = false;    // active and rho < 1
    bool good = false;   // active and rho >= theta
    Polygon outline;     // physical image of the element boundary
    Vec2 centroid = Vec2::Zero();
    std::vector<Polygon> visible; // convex pieces of the visible part, only for cut elements
    int donor_patch = -1;
    int donor_elem = -1;
    double donor_C = 0.0; // relaxed neighbor constant that produced the donor
};

struct InterfaceSegment {
    int i = -1;      // patch owning the boundary piece
    int j = -1;      // lower patch on the other side, -1 on the domain boundary
    int face = -1;   // face of patch i the piece lies on
    Vec2 a, b;       // endpoints
    Vec2 normal;     // unit outward normal of patch i
    int elem_i = -1; // element of mesh i containing the segment
    int elem_j = -1;
    double h_i = 0.0, h_j = 0.0;
    double length() const { return (b - a).norm(); }
};

struct QuadPoint {
    Vec2 xi; // parametric
    Vec2 x;  // physical
    double w;
};

struct SegmentPoint {
    Vec2 x, xi_i, xi_j;
    double w;
};

struct OverlapDiagnostics {
    std::vector<std::vector<int>> delta; // delta[i][j], j < i
    std::vector<std::vector<int>> eta;
    int n_gamma_down = 0, n_gamma_up = 0, n_gamma = 0, n_overlap = 0;
};

struct GeometryOptions {
    double theta = 0.1;
    double neighbor_c = 2.0;  // initial constant C of the neighbor predicate
    int max_relaxations = 5;  // doublings of C before giving up
    double chord_tol = 1e-6;  // relative to the domain diameter
    double snap_tol = 1e-12;  // relative to the domain diameter
    double mesh_ratio_warn = 4.0;
    bool find_neighbors = true;
};

class PatchHierarchy {
public:
    struct Patch {
        GeometryMap geo;
        TaylorHoodPair th;
        std::array<BcKind, 4> bc;
        Polygon footprint;
        std::vector<int> footprint_face; // face of the edge starting at each vertex
        std::vector<Polygon> footprint_parts;
        Eigen::AlignedBox2d bbox;
        std::vector<ElementInfo> elements;
        const TensorSplineSpace& mesh() const { return th.pressure; }
    };

    PatchHierarchy(std::vector<PatchInput> patches, GeometryOptions opt = {});

    int num_patches() const { return static_cast<int>(patches_.size()); }
    const Patch& patch(int i) const { return patches_[i]; }
    const GeometryOptions& options() const { return opt_; }
    const std::vector<InterfaceSegment>& interfaces() const { return interfaces_; }
    const std::vector<InterfaceSegment>& boundary() const { return boundary_; }
    double diameter() const { return diam_; }
    double snap() const { return snap_; }
    double max_mesh_ratio() const { return max_mesh_ratio_; }
    int num_bad() const;
    double min_active_rho() const;
    double union_area() const { return union_area_; }
    double visible_area() const;

    // volume quadrature over the visible part (tensor rule on uncut elements)
    std::vector<QuadPoint> element_quadrature(int p, int e, int n_tensor, int n_tri) const;
    // tensor rule over the full element, ignoring trimming
    std::vector<QuadPoint> full_element_quadrature(int p, int e, int n) const;
    std::vector<SegmentPoint> segment_quadrature(const InterfaceSegment& s, int n) const;
    // parametric coordinates of x, Newton started from the element centre
    Vec2 to_parametric(int p, int e, const Vec2& x) const;

    void reclassify(double theta);
    OverlapDiagnostics overlap_diagnostics() const;
    void dump(std::ostream& os) const;

private:
    void build_footprint(Patch& P) const;
    void build_elements(int i);
    void build_interfaces();
    void find_neighbors();

    std::vector<Patch> patches_;
    GeometryOptions opt_;
    std::vector<InterfaceSegment> interfaces_, boundary_;
    double diam_ = 1.0, snap_ = 1e-12, max_mesh_ratio_ = 1.0, union_area_ = 0.0;
};

bool classify_good(double rho, double theta);

// Algorithm of the good-neighbor search: scans patches k = i..N, relaxing C by doubling
struct NeighborChoice {
    int patch = -1, elem = -1;
    double C = 0.0;
};
NeighborChoice find_good_neighbor(const PatchHierarchy& h, int i, int e);

} // namespace ovs
