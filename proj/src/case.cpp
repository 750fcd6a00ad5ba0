#include "ovstokes/case.hpp"

#include <cmath>
#include <fstream>

#include "ovstokes/errors.hpp"

namespace ovs {

namespace {

const char* face_keys[4] = {"bottom", "right", "top", "left"};

std::vector<double> uniform_breaks(int n)
{
    std::vector<double> b(n + 1);
    for (int i = 0; i <= n; ++i) b[i] = static_cast<double>(i) / n;
    return b;
}

} // namespace

std::string bc_name(BcKind b)
{
    switch (b) {
    case BcKind::dirichlet: return "dirichlet";
    case BcKind::neumann: return "neumann";
    default: return "none";
    }
}

BcKind parse_bc(const std::string& s)
{
    if (s == "dirichlet") return BcKind::dirichlet;
    if (s == "neumann") return BcKind::neumann;
    if (s == "none") return BcKind::none;
    throw ConfigurationError("unknown boundary condition '" + s + "'");
}

void to_json(nlohmann::json& j, const CaseConfig& c)
{
    j = nlohmann::json::object();
    j["name"] = c.name;
    j["pressure_degree"] = c.k;
    j["regularity"] = c.alpha();
    j["theta"] = c.theta;
    j["gamma0"] = c.gamma0;
    j["flux"] = c.t == 1.0 ? "onesided" : "symmetric";
    j["stabilize"] = c.stabilize;
    j["project_visible"] = c.project_visible;
    j["levels"] = c.levels;
    j["manufactured"] = c.manufactured;
    if (c.epsilon) j["epsilon"] = *c.epsilon;
    auto& ps = j["patches"] = nlohmann::json::array();
    for (const auto& p : c.patches) {
        nlohmann::json q;
        q["geometry"]["degree"] = {p.degree_u, p.degree_v};
        q["geometry"]["knots_u"] = p.knots_u;
        q["geometry"]["knots_v"] = p.knots_v;
        auto& cp = q["geometry"]["control_points"] = nlohmann::json::array();
        for (const auto& x : p.control_points) cp.push_back({x.x(), x.y()});
        q["elements"] = {p.nx, p.ny};
        for (int f = 0; f < 4; ++f) q["bc"][face_keys[f]] = bc_name(p.bc[f]);
        ps.push_back(q);
    }
}

void from_json(const nlohmann::json& j, CaseConfig& c)
{
    try {
        c = CaseConfig{};
        c.name = j.value("name", "case");
        c.k = j.value("pressure_degree", 2);
        c.regularity = j.value("regularity", -1);
        c.theta = j.value("theta", 0.1);
        c.gamma0 = j.value("gamma0", 10.0);
        std::string flux = j.value("flux", "symmetric");
        if (flux == "symmetric")
            c.t = 0.5;
        else if (flux == "onesided")
            c.t = 1.0;
        else
            throw ConfigurationError("flux must be 'symmetric' or 'onesided'");
        c.stabilize = j.value("stabilize", true);
        c.project_visible = j.value("project_visible", false);
        c.levels = j.value("levels", 4);
        c.manufactured = j.value("manufactured", "ms-stokes-2021");
        if (j.contains("epsilon") && !j["epsilon"].is_null()) c.epsilon = j["epsilon"].get<double>();
        for (const auto& q : j.at("patches")) {
            PatchSpec p;
            const auto& g = q.at("geometry");
            auto deg = g.at("degree");
            p.degree_u = deg.at(0).get<int>();
            p.degree_v = deg.at(1).get<int>();
            p.knots_u = g.at("knots_u").get<std::vector<double>>();
            p.knots_v = g.at("knots_v").get<std::vector<double>>();
            for (const auto& x : g.at("control_points")) p.control_points.emplace_back(x.at(0).get<double>(), x.at(1).get<double>());
            p.nx = q.at("elements").at(0).get<int>();
            p.ny = q.at("elements").at(1).get<int>();
            if (p.nx < 1 || p.ny < 1) throw ConfigurationError("element counts must be positive");
            if (q.contains("bc"))
                for (int f = 0; f < 4; ++f)
                    if (q["bc"].contains(face_keys[f])) p.bc[f] = parse_bc(q["bc"][face_keys[f]].get<std::string>());
            c.patches.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("malformed case file: ") + e.what());
    }
    if (c.patches.empty()) throw ConfigurationError("case has no patches");
}

CaseConfig load_case(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open case file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError("cannot parse " + path + ": " + e.what());
    }
    return j.get<CaseConfig>();
}

void save_case(const CaseConfig& c, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigurationError("cannot write " + path);
    out << nlohmann::json(c).dump(2) << "\n";
}

PatchSpec bilinear_patch(const Vec2& p00, const Vec2& p10, const Vec2& p01, const Vec2& p11, int nx, int ny)
{
    PatchSpec p;
    p.control_points = {p00, p10, p01, p11};
    p.nx = nx;
    p.ny = ny;
    return p;
}

GeometryMap geometry_of(const PatchSpec& p)
{
    KnotVector ku(p.degree_u, p.knots_u), kv(p.degree_v, p.knots_v);
    return GeometryMap(TensorSplineSpace(ku, kv), p.control_points);
}

CaseConfig gen_two_patch(double eps)
{
    if (!(eps > 0.0 && eps < 0.5)) throw ParameterError("epsilon must lie in (0, 0.5)");
    CaseConfig c;
    c.name = "two-patch";
    c.epsilon = eps;
    PatchSpec bottom = bilinear_patch({0, 0}, {1, 0}, {0, 1}, {1, 1}, 8, 8);
    bottom.bc = {BcKind::neumann, BcKind::dirichlet, BcKind::neumann, BcKind::dirichlet};
    // the slanted side x = y - 0.125 + s cuts a triangle of area eps h^2 from
    // the four bottom cells it enters through a corner
    const double s = 0.125 * std::sqrt(2.0 * eps);
    PatchSpec top = bilinear_patch({0.125 + s, 0.25}, {0.875, 0.25}, {0.625 + s, 0.75}, {0.875, 0.75}, 5, 5);
    c.patches = {bottom, top};
    return c;
}

CaseConfig gen_multi_patch(int n)
{
    if (n < 2 || n > 5) throw ParameterError("multi-patch layouts exist for n = 2..5");
    CaseConfig c;
    c.name = "multi-patch-" + std::to_string(n);
    PatchSpec base = bilinear_patch({0, 0}, {1, 0}, {0, 1}, {1, 1}, 8, 8);
    base.bc = {BcKind::neumann, BcKind::dirichlet, BcKind::neumann, BcKind::dirichlet};
    c.patches.push_back(base);
    auto rect = [](Vec2 center, double w, double hgt, double deg, int nx, int ny) {
        const double a = deg * M_PI / 180.0;
        Vec2 ex(std::cos(a), std::sin(a)), ey(-std::sin(a), std::cos(a));
        Vec2 o = center - 0.5 * w * ex - 0.5 * hgt * ey;
        return bilinear_patch(o, o + w * ex, o + hgt * ey, o + w * ex + hgt * ey, nx, ny);
    };
    std::vector<PatchSpec> extra = {
        bilinear_patch({0.27, 0.18}, {0.91, 0.18}, {0.27, 0.70}, {0.91, 0.70}, 5, 4),
        rect({0.45, 0.55}, 0.5, 0.5, 30.0, 4, 4),
        rect({0.6, 0.45}, 0.5, 0.375, -20.0, 4, 3),
        rect({0.5, 0.5}, 0.375, 0.375, 45.0, 3, 3),
    };
    for (int i = 0; i + 1 < n; ++i) c.patches.push_back(extra[i]);
    return c;
}

PatchHierarchy build_hierarchy(const CaseConfig& c, int level, std::optional<double> theta)
{
    if (level < 0) throw ParameterError("refinement level must be non-negative");
    std::vector<PatchInput> in;
    for (const auto& p : c.patches) {
        PatchInput pi;
        pi.geometry = geometry_of(p);
        pi.th = TaylorHoodPair::make(uniform_breaks(p.nx), uniform_breaks(p.ny), c.k, c.alpha());
        for (int l = 0; l < level; ++l) pi.th = dyadic_refine(pi.th);
        pi.bc = p.bc;
        in.push_back(std::move(pi));
    }
    GeometryOptions go;
    go.theta = theta.value_or(c.theta);
    return PatchHierarchy(std::move(in), go);
}

AssemblyConfig assembly_config(const CaseConfig& c)
{
    AssemblyConfig a;
    a.t = c.t;
    a.gamma0 = c.gamma0;
    a.stabilize = c.stabilize;
    a.project_visible = c.project_visible;
    return a;
}

} // namespace ovs
