#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ovstokes/assembly.hpp"
#include "ovstokes/union_geometry.hpp"

namespace ovs {

struct PatchSpec {
    int degree_u = 1, degree_v = 1;
    std::vector<double> knots_u{0.0, 0.0, 1.0, 1.0}, knots_v{0.0, 0.0, 1.0, 1.0};
    std::vector<Vec2> control_points; // u index fastest
    int nx = 1, ny = 1;               // analysis elements at level 0
    std::array<BcKind, 4> bc{BcKind::none, BcKind::none, BcKind::none, BcKind::none};
};

struct CaseConfig {
    std::string name = "case";
    std::vector<PatchSpec> patches; // hierarchy order, bottom first
    int k = 2;                      // pressure degree
    int regularity = -1;            // -1: k-1
    double theta = 0.1;
    double gamma0 = 10.0;
    double t = 0.5; // 1/2 symmetric, 1 one-sided
    bool stabilize = true;
    bool project_visible = false;
    int levels = 4;
    std::string manufactured = "ms-stokes-2021";
    std::optional<double> epsilon;

    int alpha() const { return regularity < 0 ? k - 1 : regularity; }
};

void to_json(nlohmann::json& j, const CaseConfig& c);
void from_json(const nlohmann::json& j, CaseConfig& c);

CaseConfig load_case(const std::string& path);
void save_case(const CaseConfig& c, const std::string& path);

// unit square 8x8 under a 5x5 right trapezoid whose slanted side leaves four
// bottom cells with visible fraction eps
CaseConfig gen_two_patch(double eps);
// n = 2..5 overlapping patches on the unit square, each meeting all predecessors
CaseConfig gen_multi_patch(int n);

PatchSpec bilinear_patch(const Vec2& p00, const Vec2& p10, const Vec2& p01, const Vec2& p11, int nx, int ny);
GeometryMap geometry_of(const PatchSpec& p);

// hierarchy with every analysis mesh refined `level` times
PatchHierarchy build_hierarchy(const CaseConfig& c, int level, std::optional<double> theta = std::nullopt);
AssemblyConfig assembly_config(const CaseConfig& c);

std::string bc_name(BcKind b);
BcKind parse_bc(const std::string& s);

} // namespace ovs
