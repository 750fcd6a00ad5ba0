// Acceptance criteria A1-A6. Prints one PASS/FAIL line per criterion.
// Usage: acceptance [--known-failure A2 ...]
// Exit status is nonzero when a criterion fails that is not listed as known,
// or when a listed one passes (the list is then stale).

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "../common/properties.hpp"
#include "ovstokes/errors.hpp"
#include "ovstokes/harness.hpp"

using namespace ovs;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool in_window(double v, double lo, double hi) { return v >= lo && v <= hi; }

std::string fmt(double v, const char* f = "%.3g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

ResultRow a2_finest_k2;

Outcome a1()
{
    Outcome o;
    auto t0 = Clock::now();
    CaseConfig c = gen_two_patch(0.3);
    c.manufactured = "linear-patch";
    c.k = 2;
    for (bool st : {true, false}) {
        RunOptions ro;
        ro.stabilize = st;
        ResultRow r = run_solve(c, 0, ro);
        o.require(r.ok(), r.status);
        double e = r.err.energy + r.err.pressure;
        o.detail << (st ? "stab " : " unstab ") << fmt(e);
        o.require(e <= 1e-9, "error > 1e-9");
    }
    double t = since(t0);
    o.detail << " time " << fmt(t) << "s";
    o.require(t < 10.0, "runtime >= 10 s");
    return o;
}

Outcome a2()
{
    Outcome o;
    auto t0 = Clock::now();
    for (int k : {2, 3}) {
        CaseConfig c = gen_two_patch(1e-12);
        c.k = k;
        c.t = 0.5;
        c.stabilize = true;
        auto rows = run_convergence(c, 4);
        for (const auto& r : rows) o.require(r.ok(), "level " + std::to_string(r.level) + ": " + r.status);
        if (k == 2) a2_finest_k2 = rows.back();
        Slopes s = fit_slopes(rows);
        const double ce = k + 1, cu = k + 2, cp = k + 1, tol = k == 2 ? 0.3 : 0.4;
        o.detail << " k=" << k << ": energy " << fmt(s.energy, "%.3f") << " L2u " << fmt(s.l2_u, "%.3f") << " p0h "
                 << fmt(s.pressure, "%.3f") << ";";
        o.require(in_window(s.energy, ce - tol, ce + tol), "k=" + std::to_string(k) + " energy slope");
        o.require(in_window(s.l2_u, cu - 0.4, cu + 0.4), "k=" + std::to_string(k) + " L2u slope");
        o.require(in_window(s.pressure, cp - tol, cp + tol), "k=" + std::to_string(k) + " pressure slope");
    }
    double t = since(t0);
    o.detail << " time " << fmt(t) << "s";
    o.require(t < 600.0, "runtime >= 10 min");
    return o;
}

Outcome a3()
{
    Outcome o;
    CaseConfig c = gen_two_patch(1e-12);
    c.k = 2;
    RunOptions ro;
    ro.stabilize = false;
    ResultRow un = run_solve(c, 3, ro);
    ResultRow st = a2_finest_k2.ok() && a2_finest_k2.level == 3 ? a2_finest_k2 : run_solve(c, 3);
    o.require(un.ok() && st.ok(), "solve failed");
    double ratio = un.err.p_jump / st.err.p_jump;
    o.detail << " jump unstab " << fmt(un.err.p_jump) << " stab " << fmt(st.err.p_jump) << " ratio " << fmt(ratio);
    o.require(ratio >= 1e3, "ratio < 1e3");
    return o;
}

Outcome a4()
{
    Outcome o;
    auto t0 = Clock::now();
    std::vector<double> eps{1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12};
    auto rows = run_condition_sweep(eps, 2, true, true);
    double smin = 1e300, smax = 0.0;
    for (const auto& r : rows) {
        o.require(r.status_stab == "ok" && r.kappa_stab, "stabilized point eps=" + fmt(r.eps) + ": " + r.status_stab);
        o.require(r.status_unstab == "ok" && r.kappa_unstab,
                  "unstabilized point eps=" + fmt(r.eps) + ": " + r.status_unstab);
        if (r.kappa_stab) {
            smin = std::min(smin, *r.kappa_stab);
            smax = std::max(smax, *r.kappa_stab);
        }
    }
    double growth = rows.back().kappa_unstab.value_or(0.0) / rows.front().kappa_unstab.value_or(1.0);
    o.detail << " stabilized max/min " << fmt(smax / smin) << " (" << fmt(smin) << ".." << fmt(smax)
             << "), unstabilized growth " << fmt(growth) << " (" << fmt(rows.front().kappa_unstab.value_or(0.0))
             << " -> " << fmt(rows.back().kappa_unstab.value_or(0.0)) << ")";
    o.require(smax / smin <= 10.0, "stabilized spread > 10");
    o.require(growth >= 1e4, "unstabilized growth < 1e4");
    double t = since(t0);
    o.detail << " time " << fmt(t) << "s";
    o.require(t < 300.0, "runtime >= 5 min");
    return o;
}

Outcome a5()
{
    Outcome o;
    for (int level : {0, 1}) {
        double umin = 1e300, umax = 0.0, pmin = 1e300, pmax = 0.0;
        for (int n = 2; n <= 5; ++n) {
            ResultRow r = run_solve(gen_multi_patch(n), level);
            o.require(r.ok(), "n=" + std::to_string(n) + ": " + r.status);
            umin = std::min(umin, r.err.l2_u);
            umax = std::max(umax, r.err.l2_u);
            pmin = std::min(pmin, r.err.l2_p);
            pmax = std::max(pmax, r.err.l2_p);
        }
        o.detail << " level " << level << ": L2u max/min " << fmt(umax / umin) << " L2p max/min " << fmt(pmax / pmin)
                 << ";";
        o.require(umax / umin <= 2.0 && pmax / pmin <= 2.0, "spread > 2 at level " + std::to_string(level));
    }
    return o;
}

Outcome a6()
{
    Outcome o;
    auto check = [&](const std::string& name, double v, double tol) {
        bool ok = v <= tol;
        std::cout << "    " << (ok ? "pass" : "FAIL") << "  " << name << ": " << fmt(v) << " (tol " << fmt(tol) << ")\n";
        o.require(ok, name);
    };
    check("partition of unity", props::partition_of_unity(), 1e-12);
    check("knot-insertion exactness", props::knot_insertion(), 1e-12);

    double area = 0.0, repro = 0.0, lin = 0.0, loc = 0.0, sym = 0.0;
    int ops = 0;
    std::vector<std::pair<CaseConfig, int>> cases{
        {gen_two_patch(1e-12), 0}, {gen_two_patch(1e-12), 1}, {gen_two_patch(1e-3), 0},
        {gen_multi_patch(3), 0},   {gen_multi_patch(5), 0},   {gen_multi_patch(5), 1}};
    auto ex = manufactured("ms-stokes-2021");
    for (auto& [c, level] : cases) {
        PatchHierarchy h = build_hierarchy(c, level);
        area = std::max(area, props::visible_area(h));
        area = std::max(area, std::abs(h.visible_area() - 1.0));
        StabOperators stab(h);
        auto rp = props::polynomial_reproduction(h, stab);
        repro = std::max(repro, rp.error);
        ops += rp.operators;
        lin = std::max(lin, props::linearity(h, stab));
        loc = std::max(loc, props::locality(h, stab));
        for (bool st : {true, false}) {
            AssemblyConfig cfg = assembly_config(c);
            cfg.stabilize = st;
            StabOperators s(h, {st, false});
            sym = std::max(sym, props::symmetry(assemble_system(h, *ex, cfg, &s).matrix));
        }
    }
    check("visible-area conservation", area, 1e-8);
    check("R^p/R^v polynomial reproduction (" + std::to_string(ops) + " operators)", repro, 1e-11);
    o.require(ops > 0, "no operator tested for reproduction");
    check("operator linearity", lin, 1e-12);
    check("operator locality", loc, 1e-14);
    check("system symmetry", sym, 1e-12);

    auto nb = props::stabilized_equals_plain(gen_two_patch(0.3));
    o.require(nb.bad == 0 && nb.same_size, "no-bad identity setup");
    check("stabilized == unstabilized without bad elements", std::max(nb.matrix, nb.rhs), 1e-12);
    check("finite-difference divergence", props::fd_divergence(*ex), 1e-6);

    double base = 0.0, worst = 0.0;
    for (double e : {0.3, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
        PatchHierarchy h = build_hierarchy(gen_two_patch(e), 0);
        StabOperators stab(h);
        double r = velocity_stability_ratio(h, &stab);
        if (e == 0.3) base = r;
        worst = std::max(worst, r / base);
    }
    check("R^v stability ratio max over sweep / value at eps=0.3", worst, 10.0);
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    std::set<std::string> known;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--known-failure") == 0 && i + 1 < argc)
            known.insert(argv[++i]);
        else {
            std::cerr << "usage: acceptance [--known-failure ID]...\n";
            return 2;
        }
    }
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5}, {"A6", a6}};
    int unexpected = 0;
    for (auto& [id, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        const bool listed = known.count(id) > 0;
        std::cout << id << ": " << (o.pass ? "PASS" : "FAIL") << (listed ? " (known failure)" : "") << " |"
                  << o.detail.str() << std::endl;
        if (o.pass == listed) ++unexpected;
    }
    return unexpected == 0 ? 0 : 1;
}
