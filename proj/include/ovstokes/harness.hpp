#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ovstokes/assembly.hpp"
#include "ovstokes/case.hpp"
#include "ovstokes/solve.hpp"

namespace ovs {

struct ResultRow {
    int level = 0;
    double h = 0.0; // largest element diameter over all patches
    int dofs = 0;   // unknowns of the reduced system
    ErrorReport err;
    std::optional<double> kappa;
    double seconds = 0.0;
    std::string status = "ok";
    bool ok() const { return status == "ok"; }
};

struct Slopes {
    // NaN when undefined (errors at round-off level or fewer than two usable rows)
    double energy, l2_u, pressure, l2_p, p_jump;
};

struct RunOptions {
    std::optional<bool> stabilize;
    std::optional<double> theta, gamma0, t;
    bool kappa = false;
    std::string dump_geometry; // empty: no dump
};

CaseConfig with_overrides(CaseConfig c, const RunOptions& o);

// one solve on the hierarchy refined `level` times; failures are recorded in status
ResultRow run_solve(const CaseConfig& c, int level, const RunOptions& o = {});
// levels 0..levels-1, requires levels >= 3
std::vector<ResultRow> run_convergence(const CaseConfig& c, int levels, const RunOptions& o = {});
Slopes fit_slopes(const std::vector<ResultRow>& rows);
// least-squares slope of log(err) against log(h); NaN if undefined
double fit_slope(const std::vector<double>& h, const std::vector<double>& err);

struct SweepRow {
    double eps = 0.0;
    std::optional<double> kappa_stab, kappa_unstab;
    int dofs_stab = 0, dofs_unstab = 0;
    std::string status_stab = "skipped", status_unstab = "skipped";
};

// two-patch family on the level-0 meshes, one row per eps
std::vector<SweepRow> run_condition_sweep(const std::vector<double>& eps, int k, bool stabilized, bool unstabilized);

void emit_csv(std::ostream& os, const std::vector<ResultRow>& rows, bool with_slopes, bool deterministic);
void emit_csv(const std::string& path, const std::vector<ResultRow>& rows, bool with_slopes, bool deterministic);
void emit_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void emit_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);
void emit_geometry_dump(const PatchHierarchy& h, const std::string& path);

// header + rows as strings
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& is);
CsvTable read_csv(const std::string& path);

std::string format_number(double v);

} // namespace ovs
