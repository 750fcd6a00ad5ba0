#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ovstokes/case.hpp"
#include "ovstokes/errors.hpp"
#include "ovstokes/harness.hpp"

using namespace ovs;

namespace {

struct Common {
    std::string stabilize, flux, out, dump;
    std::optional<double> theta, gamma0;
    bool deterministic = false;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--stabilize", c.stabilize, "on or off, overrides the case")->check(CLI::IsMember({"on", "off"}));
    app->add_option("--theta", c.theta, "good-element threshold");
    app->add_option("--gamma0", c.gamma0, "penalty base");
    app->add_option("--flux", c.flux, "symmetric or onesided")->check(CLI::IsMember({"symmetric", "onesided"}));
    app->add_option("--out", c.out, "results CSV (stdout when omitted)");
    app->add_flag("--deterministic", c.deterministic, "write wall_time as 0");
}

RunOptions to_options(const Common& c)
{
    RunOptions o;
    if (!c.stabilize.empty()) o.stabilize = c.stabilize == "on";
    o.theta = c.theta;
    o.gamma0 = c.gamma0;
    if (!c.flux.empty()) o.t = c.flux == "symmetric" ? 0.5 : 1.0;
    o.dump_geometry = c.dump;
    return o;
}

void write_rows(const Common& c, const std::vector<ResultRow>& rows, bool slopes)
{
    if (c.out.empty())
        emit_csv(std::cout, rows, slopes, c.deterministic);
    else
        emit_csv(c.out, rows, slopes, c.deterministic);
}

int failures(const std::vector<ResultRow>& rows)
{
    int n = 0;
    for (const auto& r : rows)
        if (!r.ok()) {
            std::cerr << "level " << r.level << " failed: " << r.status << "\n";
            ++n;
        }
    return n;
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double x = std::stod(item, &pos);
        if (pos != item.size()) throw ParameterError("bad number '" + item + "'");
        v.push_back(x);
    }
    if (v.empty()) throw ParameterError("empty list");
    return v;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stokes solver on overlapping spline patches"};
    app.require_subcommand(1);

    Common sc;
    std::string solve_case;
    int solve_level = 0;
    bool solve_kappa = false;
    auto* solve = app.add_subcommand("solve", "solve one case at one refinement level");
    solve->add_option("case", solve_case, "case JSON")->required();
    add_common(solve, sc);
    solve->add_option("--level", solve_level, "refinement level")->check(CLI::NonNegativeNumber);
    solve->add_flag("--kappa", solve_kappa, "also report the spectral condition number");
    solve->add_option("--dump-geometry", sc.dump, "write the classified geometry as JSON");

    Common cc;
    std::string conv_case;
    int conv_levels = 0;
    auto* conv = app.add_subcommand("convergence", "solve on levels 0..L-1 and fit rates");
    conv->add_option("case", conv_case, "case JSON")->required();
    conv->add_option("--levels", conv_levels, "number of levels, at least 3")->required();
    add_common(conv, cc);

    std::string sweep_eps = "1e-2,1e-4,1e-6,1e-8,1e-10,1e-12", sweep_mode = "both", sweep_out;
    int sweep_k = 2;
    auto* sweep = app.add_subcommand("condition-sweep", "condition numbers of the two-patch family");
    sweep->add_option("--eps", sweep_eps, "comma separated eps values");
    sweep->add_option("--k", sweep_k, "pressure degree")->check(CLI::Range(1, 4));
    sweep->add_option("--mode", sweep_mode, "stabilized, unstabilized or both")
        ->check(CLI::IsMember({"stabilized", "unstabilized", "both"}));
    sweep->add_option("--out", sweep_out, "CSV (stdout when omitted)");

    auto* gen = app.add_subcommand("gen", "write a case JSON");
    gen->require_subcommand(1);
    double gen_eps = 1e-12;
    int gen_n = 2, gen_k = 2;
    std::string gen_out;
    auto* gen2 = gen->add_subcommand("two-patch", "unit square under a trapezoid");
    gen2->add_option("--eps", gen_eps, "visible fraction of the four sliver cells")->required();
    auto* genm = gen->add_subcommand("multi-patch", "n overlapping patches");
    genm->add_option("--n", gen_n, "number of patches, 2..5")->required();
    for (auto* g : {gen2, genm}) {
        g->add_option("--k", gen_k, "pressure degree");
        g->add_option("--out", gen_out, "output file (stdout when omitted)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            CaseConfig c = load_case(solve_case);
            RunOptions o = to_options(sc);
            o.kappa = solve_kappa;
            std::vector<ResultRow> rows{run_solve(c, solve_level, o)};
            write_rows(sc, rows, false);
            return failures(rows) ? 1 : 0;
        }
        if (*conv) {
            CaseConfig c = load_case(conv_case);
            auto rows = run_convergence(c, conv_levels, to_options(cc));
            write_rows(cc, rows, true);
            return failures(rows) ? 1 : 0;
        }
        if (*sweep) {
            bool st = sweep_mode != "unstabilized", un = sweep_mode != "stabilized";
            auto rows = run_condition_sweep(parse_list(sweep_eps), sweep_k, st, un);
            if (sweep_out.empty())
                emit_sweep_csv(std::cout, rows);
            else
                emit_sweep_csv(sweep_out, rows);
            int bad = 0;
            for (const auto& r : rows) {
                if (st && r.status_stab != "ok") {
                    std::cerr << "eps " << r.eps << " stabilized: " << r.status_stab << "\n";
                    ++bad;
                }
                if (un && r.status_unstab != "ok") {
                    std::cerr << "eps " << r.eps << " unstabilized: " << r.status_unstab << "\n";
                    ++bad;
                }
            }
            return bad ? 1 : 0;
        }
        if (*gen) {
            CaseConfig c = *gen2 ? gen_two_patch(gen_eps) : gen_multi_patch(gen_n);
            c.k = gen_k;
            if (gen_out.empty())
                std::cout << nlohmann::json(c).dump(2) << "\n";
            else
                save_case(c, gen_out);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
