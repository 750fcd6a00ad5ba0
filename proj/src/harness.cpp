#include "ovstokes/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ovstokes/errors.hpp"
#include "ovstokes/manufactured.hpp"
#include "ovstokes/stabilization.hpp"

namespace ovs {

namespace {

const double nan_v = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigurationError("cannot write " + path);
    return out;
}

double max_element_h(const PatchHierarchy& h)
{
    double m = 0.0;
    for (int p = 0; p < h.num_patches(); ++p)
        for (const auto& K : h.patch(p).elements)
            if (K.active) m = std::max(m, K.h);
    return m;
}

} // namespace

std::string format_number(double v)
{
    if (std::isnan(v)) return "undefined";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CaseConfig with_overrides(CaseConfig c, const RunOptions& o)
{
    if (o.stabilize) c.stabilize = *o.stabilize;
    if (o.theta) c.theta = *o.theta;
    if (o.gamma0) c.gamma0 = *o.gamma0;
    if (o.t) c.t = *o.t;
    return c;
}

ResultRow run_solve(const CaseConfig& c0, int level, const RunOptions& o)
{
    const CaseConfig c = with_overrides(c0, o);
    ResultRow row;
    row.level = level;
    auto t0 = std::chrono::steady_clock::now();
    try {
        auto exact = manufactured(c.manufactured);
        PatchHierarchy h = build_hierarchy(c, level);
        if (!o.dump_geometry.empty()) emit_geometry_dump(h, o.dump_geometry);
        row.h = max_element_h(h);
        AssemblyConfig cfg = assembly_config(c);
        StabOperators stab(h, {cfg.stabilize, cfg.project_visible});
        StokesSystem sys = assemble_system(h, *exact, cfg, &stab);
        row.dofs = static_cast<int>(sys.matrix.rows());
        SolveReport rep;
        Eigen::VectorXd x = solve_direct(sys.matrix, sys.rhs, rep);
        DiscreteField f = to_field(h, sys.dofs, sys.expand(x));
        row.err = errors_vs_exact(h, &stab, f, exact.get());
        if (o.kappa) row.kappa = condition_number(sys.matrix);
    } catch (const Error& e) {
        row.status = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

std::vector<ResultRow> run_convergence(const CaseConfig& c, int levels, const RunOptions& o)
{
    if (levels < 3) throw ParameterError("a convergence study needs at least 3 levels");
    std::vector<ResultRow> rows;
    for (int l = 0; l < levels; ++l) {
        RunOptions ol = o;
        if (!o.dump_geometry.empty()) ol.dump_geometry = o.dump_geometry + "." + std::to_string(l);
        rows.push_back(run_solve(c, l, ol));
    }
    return rows;
}

double fit_slope(const std::vector<double>& h, const std::vector<double>& err)
{
    std::vector<double> x, y;
    double emax = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(err[i] > 0.0) || !std::isfinite(err[i]) || !(h[i] > 0.0)) continue;
        x.push_back(std::log(h[i]));
        y.push_back(std::log(err[i]));
        emax = std::max(emax, err[i]);
    }
    // round-off level errors carry no rate
    if (x.size() < 2 || emax < 1e-11) return nan_v;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : nan_v;
}

Slopes fit_slopes(const std::vector<ResultRow>& rows)
{
    std::vector<double> h, e1, eu, ep, epl, ej;
    for (const auto& r : rows) {
        if (!r.ok()) continue;
        h.push_back(r.h);
        e1.push_back(r.err.energy);
        eu.push_back(r.err.l2_u);
        ep.push_back(r.err.pressure);
        epl.push_back(r.err.l2_p);
        ej.push_back(r.err.p_jump);
    }
    return {fit_slope(h, e1), fit_slope(h, eu), fit_slope(h, ep), fit_slope(h, epl), fit_slope(h, ej)};
}

std::vector<SweepRow> run_condition_sweep(const std::vector<double>& eps, int k, bool stabilized, bool unstabilized)
{
    std::vector<SweepRow> out;
    auto exact = manufactured("ms-stokes-2021");
    for (double e : eps) {
        SweepRow row;
        row.eps = e;
        for (int mode = 0; mode < 2; ++mode) {
            const bool st = mode == 0;
            if ((st && !stabilized) || (!st && !unstabilized)) continue;
            std::string status = "ok";
            std::optional<double> kappa;
            int dofs = 0;
            try {
                CaseConfig c = gen_two_patch(e);
                c.k = k;
                c.stabilize = st;
                PatchHierarchy h = build_hierarchy(c, 0);
                AssemblyConfig cfg = assembly_config(c);
                StabOperators stab(h, {st, cfg.project_visible});
                StokesSystem sys = assemble_system(h, *exact, cfg, &stab);
                dofs = static_cast<int>(sys.matrix.rows());
                kappa = condition_number(sys.matrix);
            } catch (const Error& ex) {
                status = ex.what();
            }
            if (st) {
                row.kappa_stab = kappa;
                row.dofs_stab = dofs;
                row.status_stab = status;
            } else {
                row.kappa_unstab = kappa;
                row.dofs_unstab = dofs;
                row.status_unstab = status;
            }
        }
        out.push_back(row);
    }
    return out;
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string r = "\"";
    for (char ch : s) {
        if (ch == '"') r += '"';
        r += ch;
    }
    return r + "\"";
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

} // namespace

// columns: level,h,dofs,err_u_1h,err_u_l2,err_p_0h,err_p_l2,p_jump,kappa,wall_time,status
// optional trailing row with level = slope carries the fitted rates
void emit_csv(std::ostream& os, const std::vector<ResultRow>& rows, bool with_slopes, bool deterministic)
{
    os << "level,h,dofs,err_u_1h,err_u_l2,err_p_0h,err_p_l2,p_jump,kappa,wall_time,status\n";
    for (const auto& r : rows) {
        os << r.level << ',' << format_number(r.h) << ',' << r.dofs << ',';
        if (r.ok())
            os << format_number(r.err.energy) << ',' << format_number(r.err.l2_u) << ',' << format_number(r.err.pressure)
               << ',' << format_number(r.err.l2_p) << ',' << format_number(r.err.p_jump) << ',';
        else
            os << ",,,,,";
        os << opt_number(r.kappa) << ',' << format_number(deterministic ? 0.0 : r.seconds) << ',' << csv_field(r.status)
           << '\n';
    }
    if (with_slopes) {
        Slopes s = fit_slopes(rows);
        os << "slope,,," << format_number(s.energy) << ',' << format_number(s.l2_u) << ',' << format_number(s.pressure)
           << ',' << format_number(s.l2_p) << ',' << format_number(s.p_jump) << ",,,\n";
    }
}

void emit_csv(const std::string& path, const std::vector<ResultRow>& rows, bool with_slopes, bool deterministic)
{
    auto out = open_out(path);
    emit_csv(out, rows, with_slopes, deterministic);
}

void emit_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    // all points use the unrefined meshes (level 0)
    os << "eps,level,kappa_stabilized,kappa_unstabilized,dofs_stabilized,dofs_unstabilized,status_stabilized,status_unstabilized\n";
    for (const auto& r : rows)
        os << format_number(r.eps) << ",0," << opt_number(r.kappa_stab) << ',' << opt_number(r.kappa_unstab) << ','
           << r.dofs_stab << ',' << r.dofs_unstab << ',' << csv_field(r.status_stab) << ',' << csv_field(r.status_unstab)
           << '\n';
}

void emit_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows)
{
    auto out = open_out(path);
    emit_sweep_csv(out, rows);
}

void emit_geometry_dump(const PatchHierarchy& h, const std::string& path)
{
    auto out = open_out(path);
    h.dump(out);
}

CsvTable read_csv(std::istream& is)
{
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        std::vector<std::string> f;
        std::string cur;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            char ch = line[i];
            if (quoted) {
                if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else if (ch == '"') {
                    quoted = false;
                } else {
                    cur += ch;
                }
            } else if (ch == '"') {
                quoted = true;
            } else if (ch == ',') {
                f.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        f.push_back(cur);
        if (first)
            t.header = f;
        else
            t.rows.push_back(f);
        first = false;
    }
    return t;
}

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read " + path);
    return read_csv(in);
}

} // namespace ovs
