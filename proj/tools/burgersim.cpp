// Command-line front end: scenario configs in, CSV time series and
// invariant/convergence reports out.
//
// Exit codes: 0 success, 1 invariant failure, 2 usage/config error,
// 3 runtime failure (blow-up or integration failure).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "burgersim/config.hpp"
#include "burgersim/csv.hpp"
#include "burgersim/sim.hpp"

namespace {

using namespace burgersim;

std::string g12(double v) { return detail::format_g12(v); }

int fail_usage(const std::string& msg) {
    std::cerr << "error: usage: " << msg << "\n";
    return 2;
}

int fail_config(const std::string& msg) {
    std::cerr << "error: config: " << msg << "\n";
    return 2;
}

int fail_runtime(const std::string& msg) {
    std::cerr << "error: runtime: " << msg << "\n";
    return 3;
}

std::string run_failure_line(const RunRecord& rec) {
    std::ostringstream os;
    os << run_status_name(rec.status) << " at t=" << g12(rec.fail_time);
    if (!rec.fail_detail.empty()) os << " (" << rec.fail_detail << ")";
    return os.str();
}

void print_diagnostics(const RunRecord& rec) {
    std::cout << "diagnostic: fitted_decay_slope=";
    if (std::isnan(rec.fitted_decay_slope))
        std::cout << "n/a";
    else
        std::cout << g12(rec.fitted_decay_slope);
    std::cout << " (guaranteed rate lambda/2=" << g12(0.5 * rec.lambda) << ")\n";
}

int cmd_simulate(const std::string& config_path, const std::string& out_override) {
    Scenario sc;
    try {
        sc = load_scenario(config_path);
    } catch (const ConfigError& ex) {
        return fail_config(ex.what());
    }
    if (!out_override.empty()) sc.out_dir = out_override;

    const RunRecord rec = run_closed_loop(sc);

    std::error_code ec;
    std::filesystem::create_directories(sc.out_dir, ec);
    const std::string csv_path =
        (std::filesystem::path(sc.out_dir) /
         (std::filesystem::path(config_path).stem().string() + ".csv"))
            .string();
    try {
        emit_csv(rec, csv_path);
    } catch (const IoError& ex) {
        return fail_runtime(ex.what());
    }

    std::cout << "simulate: status=" << run_status_name(rec.status)
              << " lambda=" << g12(rec.lambda) << " samples=" << rec.samples.size()
              << " csv=" << csv_path << "\n";
    // only meaningful when the run actually covered the late window
    bool any_late = false;
    double max_e_late = 0.0;
    for (const Sample& s : rec.samples)
        if (s.t >= 2.0) {
            any_late = true;
            max_e_late = std::max(max_e_late, std::abs(s.e));
        }
    if (any_late)
        std::cout << "simulate: max |e(t)| for t >= 2: " << g12(max_e_late) << "\n";
    print_diagnostics(rec);

    if (rec.status != RunStatus::completed) return fail_runtime(run_failure_line(rec));
    return 0;
}

int cmd_verify(const std::string& config_path) {
    Scenario sc;
    try {
        sc = load_scenario(config_path);
    } catch (const ConfigError& ex) {
        return fail_config(ex.what());
    }

    const RunRecord rec = run_closed_loop(sc);
    if (rec.status != RunStatus::completed) return fail_runtime(run_failure_line(rec));

    const InvariantReport rep = check_invariants(rec, sc.tol);
    for (const InvariantCheck& c : rep.checks) {
        std::cout << "check " << c.name << ": " << (c.pass ? "PASS" : "FAIL")
                  << " worst=" << g12(c.worst_value) << " at t=" << g12(c.worst_time)
                  << " tolerance=" << g12(c.tolerance) << "\n";
    }
    print_diagnostics(rec);
    if (!rep.all_pass) {
        std::cout << "verify: FAIL\n";
        return 1;
    }
    std::cout << "verify: PASS\n";
    return 0;
}

int cmd_converge(const std::string& config_path, const std::string& grids_arg,
                 double dt_coeff, DtRule rule) {
    Scenario sc;
    try {
        sc = load_scenario(config_path, GainPolicy::allow_zero);
    } catch (const ConfigError& ex) {
        return fail_config(ex.what());
    }

    std::vector<int> grids;
    {
        std::stringstream ss(grids_arg);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                grids.push_back(std::stoi(item));
            } catch (const std::exception&) {
                return fail_usage("bad grid list '" + grids_arg + "'");
            }
        }
    }
    if (grids.size() < 3) return fail_usage("need at least 3 grids");
    for (std::size_t i = 0; i < grids.size(); ++i) {
        if (grids[i] < 3) return fail_usage("grid sizes must be >= 3");
        if (i > 0 && grids[i] - 1 != 2 * (grids[i - 1] - 1))
            return fail_usage("each grid must refine the previous by 2x");
    }
    if (dt_coeff <= 0.0) return fail_usage("the dt coefficient must be positive");

    const ConvergenceReport rep = convergence_study(sc, grids, dt_coeff, rule);
    if (!rep.completed)
        return fail_runtime("level n=" + std::to_string(rep.failed_level_n) +
                            " failed: " + rep.fail_detail);

    for (const ConvergenceLevel& lvl : rep.levels) {
        std::cout << "level n=" << lvl.n << " dt=" << g12(lvl.dt)
                  << " mean_res=" << g12(lvl.max_mean_res)
                  << " superpos_res=" << g12(lvl.max_sup_res);
        if (rep.has_oracle) std::cout << " oracle_err=" << g12(lvl.oracle_err);
        std::cout << "\n";
    }
    // An order is undefined when a residual is exactly zero at both levels
    // (e.g. the regulator is inactive); print n/a rather than nan.
    std::cout << "mean_res orders:";
    for (double p : rep.mean_orders)
        std::cout << " " << (std::isfinite(p) ? g12(p) : "n/a");
    std::cout << "\n";
    if (rep.has_oracle) {
        std::cout << "oracle_err orders:";
        for (double p : rep.oracle_orders)
            std::cout << " " << (std::isfinite(p) ? g12(p) : "n/a");
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation lab for boundary-controlled viscous Burgers flow"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string grids = "51,101,201";
    double dt_over_dx = 0.2;
    double dt_over_dx2 = 0.0;

    CLI::App* sim = app.add_subcommand("simulate", "run a scenario and write CSV");
    sim->add_option("--config", config_path, "scenario config file")->required();
    sim->add_option("--out", out_dir, "output directory (overrides config)");

    CLI::App* ver = app.add_subcommand("verify", "run a scenario and check invariants");
    ver->add_option("--config", config_path, "scenario config file")->required();

    CLI::App* con = app.add_subcommand("converge", "grid refinement study");
    con->add_option("--config", config_path, "scenario config file")->required();
    con->add_option("--grids", grids, "comma-separated node counts (default 51,101,201)");
    CLI::Option* lin = con->add_option("--dt-over-dx", dt_over_dx,
                                       "time step per unit dx (default 0.2)");
    CLI::Option* quad =
        con->add_option("--dt-over-dx2", dt_over_dx2,
                        "time step per unit dx^2 (solution-order studies)");
    lin->excludes(quad);
    quad->excludes(lin);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir);
        if (ver->parsed()) return cmd_verify(config_path);
        if (con->parsed()) {
            const bool quadratic = quad->count() > 0;
            return cmd_converge(config_path, grids,
                                quadratic ? dt_over_dx2 : dt_over_dx,
                                quadratic ? DtRule::quadratic : DtRule::linear);
        }
    } catch (const std::exception& ex) {
        return fail_runtime(ex.what());
    }
    return fail_usage("no command given");
}
