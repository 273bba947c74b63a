// nambu: command-line driver for the Nambu moment dynamics engine.
//
//   nambu run --model cubic --method nambu --qc 0 --pc 1.8 --out traj.csv
//   nambu verify consistency --multiplet quartet
//   nambu check fi --model henon-heiles
//   nambu reduce --moment 4 --mode zero-cumulant
//   nambu compare a.csv b.csv --columns x1_0,x3_0 --tol 1e-4
//
// Exit codes: 0 success, 1 a check failed, 2 configuration error,
// 3 numerical abort.

#include "nambu/brackets.hpp"
#include "nambu/closure.hpp"
#include "nambu/constraints.hpp"
#include "nambu/dynamics.hpp"
#include "nambu/errors.hpp"
#include "nambu/scenarios.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;
constexpr int kNumericalAbort = 3;

struct RunArgs {
    std::string model;
    std::string method = "nambu";
    std::vector<double> qc;
    std::vector<double> pc;
    std::vector<double> sigma;
    double dt = 1e-3;
    double t_end = 0.0;
    int stride = 1;
    std::string out = "-";
    std::string closure = "zero-cumulant";
    std::optional<double> q_stop;
    std::optional<double> hbar;
    bool no_absorber = false;
    std::string snapshot;
};

int do_run(const RunArgs& a) {
    using namespace nambu;
    const ModelId id = parse_model(a.model);
    ModelSpec model = builtin_model(id);
    model.closure = parse_closure_mode(a.closure);
    if (a.hbar) model.hbar = *a.hbar;

    PacketSpec packet = default_packet(id);
    if (!a.qc.empty()) packet.qc = a.qc;
    if (!a.pc.empty()) packet.pc = a.pc;
    packet.sigma = a.sigma;

    RunOptions opts;
    opts.dt = a.dt;
    opts.t_end = a.t_end;
    opts.stride = a.stride;
    opts.q_stop = a.q_stop;
    opts.use_absorber = !a.no_absorber;

    const Method method = parse_method(a.method);
    std::vector<std::string> warnings;
    const Trajectory traj = run_scenario(model, packet, method, opts, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    if (a.out == "-") {
        write_trajectory_csv(std::cout, traj);
    } else {
        std::ofstream f(a.out);
        if (!f) throw ConfigError("cannot open output file " + a.out);
        write_trajectory_csv(f, traj);
    }
    if (!a.snapshot.empty()) {
        if (method != Method::quantum) throw ConfigError("--snapshot is only meaningful with --method quantum");
        const Grid grid = default_grid(id);
        std::ofstream f(a.snapshot, std::ios::binary);
        if (!f) throw ConfigError("cannot open snapshot file " + a.snapshot);
        write_snapshot(f, initial_wavefunction(model, packet, grid));
    }

    std::cerr << "status: " << to_string(traj.status) << ", rows: " << traj.rows.size();
    if (!traj.diagnostic.empty()) std::cerr << " (" << traj.diagnostic << ')';
    std::cerr << '\n';
    return traj.status == RunStatus::non_finite ? kNumericalAbort : 0;
}

int do_consistency(const std::string& name, const std::string& file, int dofs, int samples, double tol) {
    using namespace nambu;
    MultipletDef m = [&] {
        if (!file.empty()) {
            std::ifstream in(file);
            if (!in) throw ConfigError("cannot open multiplet file " + file);
            return load_multiplet(in, dofs);
        }
        return builtin_multiplet(name, dofs);
    }();
    ConsistencyOptions opts;
    opts.samples = samples;
    opts.tolerance = tol;
    const auto reports = verify_consistency(m, opts);
    write_consistency_reports(std::cout, reports);
    int failed = 0;
    for (const auto& r : reports) failed += r.pass ? 0 : 1;
    if (failed == 0) {
        std::cout << m.name() << ": all pairs pass\n";
        return 0;
    }
    std::cout << m.name() << ": " << failed << " pair(s) FAIL\n";
    return kCheckFailed;
}

int do_fi(const std::string& model_name, int samples, std::uint64_t seed) {
    using namespace nambu;
    const ModelSpec model = builtin_model(parse_model(model_name));
    const HamiltonianSet h = model.hamiltonians();
    const Layout layout = model.multiplet_def().layout();
    std::vector<Poly> as;
    if (model.id == ModelId::henon_heiles) {
        as = {Poly::var(VarId::x(1, 1)), Poly::var(VarId::x(2, 1)), Poly::var(VarId::x(2, 0)),
              Poly::var(VarId::x(4, 1))};
    } else {
        for (VarId v : layout.variables()) as.push_back(Poly::var(v));
    }
    const auto bs = h.all();
    const auto states = sample_states(layout, samples, seed);
    const auto reports = check_fundamental_identity(as, bs, states, layout);
    std::cout << std::setprecision(17);
    write_bracket_reports(std::cout, reports);
    return 0;
}

int do_reduce(int n, const std::string& mode) {
    using namespace nambu;
    std::cout << reduce_moment(n, parse_closure_mode(mode)).to_string() << '\n';
    return 0;
}

int do_compare(const std::string& a_path, const std::string& b_path, const std::vector<std::string>& cols,
               double tol) {
    using namespace nambu;
    auto load = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open trajectory " + path);
        return read_trajectory_csv(in);
    };
    const Trajectory a = load(a_path);
    const Trajectory b = load(b_path);
    const CompareSummary s = compare(a, b, cols, tol);
    std::cout << std::setprecision(10) << "column,max_abs,rms,pass\n";
    for (const auto& c : s.columns) std::cout << c.column << ',' << c.max_abs << ',' << c.rms << ',' << c.pass << '\n';
    return s.pass ? 0 : kCheckFailed;
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    for (const auto& a : args) {
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
}

// Expands `run --config FILE` into flags. Each `key = value` line becomes
// `--key value` unless the flag is already on the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    if (args.empty() || args.front() != "run") return args;
    std::string path;
    for (std::size_t k = 1; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) {
            path = args[k + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k), args.begin() + static_cast<std::ptrdiff_t>(k + 2));
            break;
        }
        if (args[k].rfind("--config=", 0) == 0) {
            path = args[k].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k));
            break;
        }
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw nambu::ConfigError("cannot open config file " + path);
    std::vector<std::string> extra;
    for (const CLI::ConfigItem& item : CLI::ConfigINI{}.from_config(in)) {
        const std::string flag = "--" + item.name;
        if (item.name.empty() || has_flag(args, flag)) continue;
        if (flag == "--no-absorber") {
            if (!item.inputs.empty() && (item.inputs[0] == "true" || item.inputs[0] == "1")) extra.push_back(flag);
            continue;
        }
        std::string value;
        for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
        extra.push_back(flag);
        extra.push_back(value);
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nambu moment dynamics: closures, brackets, trajectories"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "integrate a built-in scenario and write a trajectory CSV");
    std::string config_path; // consumed by expand_config
    run->add_option("--config", config_path, "key = value file mirroring the flags; flags override it");
    run->add_option("--model", run_args.model, "harmonic | cubic | henon-heiles")->required();
    run->add_option("--method", run_args.method, "quantum | nambu | classical")->capture_default_str();
    run->add_option("--qc", run_args.qc, "initial packet centres, one per DOF")->delimiter(',');
    run->add_option("--pc", run_args.pc, "initial packet momenta, one per DOF")->delimiter(',');
    run->add_option("--sigma", run_args.sigma, "packet widths (default sqrt(hbar/2mw))")->delimiter(',');
    run->add_option("--dt", run_args.dt, "time step")->capture_default_str();
    run->add_option("--t-end", run_args.t_end, "final time (default per model)");
    run->add_option("--stride", run_args.stride, "record every n-th step")->capture_default_str();
    run->add_option("--out", run_args.out, "output CSV path, - for stdout")->capture_default_str();
    run->add_option("--closure", run_args.closure, "zero-cumulant | ignore-fluctuation")->capture_default_str();
    run->add_option("--q-stop", run_args.q_stop, "stop once <q> drops below this (cubic default -15)");
    run->add_option("--hbar", run_args.hbar, "Planck constant (default 1)");
    run->add_flag("--no-absorber", run_args.no_absorber, "disable the quantum edge absorber");
    run->add_option("--snapshot", run_args.snapshot, "write the initial wavefunction (quantum only)");

    auto* verify = app.add_subcommand("verify", "verify structural identities");
    verify->require_subcommand(1);
    auto* consistency = verify->add_subcommand("consistency", "check the consistency conditions of a multiplet");
    std::string multiplet = "quartet";
    std::string multiplet_file;
    int cons_dofs = 1;
    int cons_samples = 50;
    double cons_tol = 1e-10;
    consistency->add_option("--multiplet", multiplet, "triplet | quartet")->capture_default_str();
    consistency->add_option("--multiplet-file", multiplet_file, "key = value multiplet definition");
    consistency->add_option("--dofs", cons_dofs, "number of DOFs")->capture_default_str();
    consistency->add_option("--samples", cons_samples, "random (q,p) samples")->capture_default_str();
    consistency->add_option("--tolerance", cons_tol, "max residual")->capture_default_str();

    auto* check = app.add_subcommand("check", "evaluate bracket identities");
    check->require_subcommand(1);
    auto* fi = check->add_subcommand("fi", "fundamental identity of a model's Nambu bracket");
    std::string fi_model = "henon-heiles";
    int fi_samples = 20;
    std::uint64_t fi_seed = 20140601;
    fi->add_option("--model", fi_model, "harmonic | cubic | henon-heiles")->capture_default_str();
    fi->add_option("--samples", fi_samples, "random states")->capture_default_str();
    fi->add_option("--seed", fi_seed, "sampler seed")->capture_default_str();

    auto* reduce = app.add_subcommand("reduce", "print the closure polynomial of <q^n>");
    int moment = 4;
    std::string mode = "zero-cumulant";
    reduce->add_option("--moment", moment, "moment order n")->required();
    reduce->add_option("--mode", mode, "zero-cumulant | ignore-fluctuation")->capture_default_str();

    auto* cmp = app.add_subcommand("compare", "compare two trajectory CSV files");
    std::string cmp_a;
    std::string cmp_b;
    std::vector<std::string> cmp_cols;
    double cmp_tol = 1e-4;
    cmp->add_option("a", cmp_a, "reference trajectory")->required();
    cmp->add_option("b", cmp_b, "trajectory resampled onto the reference times")->required();
    cmp->add_option("--columns", cmp_cols, "columns to compare (default: all shared)")->delimiter(',');
    cmp->add_option("--tol", cmp_tol, "max abs difference")->capture_default_str();

    try {
        std::vector<std::string> args = expand_config({argv + 1, argv + argc});
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    } catch (const nambu::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (run->parsed()) return do_run(run_args);
        if (consistency->parsed())
            return do_consistency(multiplet, multiplet_file, cons_dofs, cons_samples, cons_tol);
        if (fi->parsed()) return do_fi(fi_model, fi_samples, fi_seed);
        if (reduce->parsed()) return do_reduce(moment, mode);
        if (cmp->parsed()) return do_compare(cmp_a, cmp_b, cmp_cols, cmp_tol);
    } catch (const nambu::NonFiniteState& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        return kNumericalAbort;
    } catch (const nambu::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return 0;
}
