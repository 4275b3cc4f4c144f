#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hysterobeam/analysis.hpp"
#include "hysterobeam/beam.hpp"
#include "hysterobeam/config.hpp"
#include "hysterobeam/rom.hpp"
#include "hysterobeam/trajectory.hpp"

namespace hb = hysterobeam;
namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Path to a config file");
    cmd->add_option("--preset", args.preset,
                    "Named preset (resolved in $HYSTEROBEAM_PRESETS or ./presets)");
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--seed", args.seed, "Override the run seed")
        ->each([&args](const std::string&) { args.seed_given = true; });
    cmd->add_option("--workers", args.workers, "Worker threads for snapshot runs");
    cmd->add_option("--set", args.overrides,
                    "Override one config value (section.key=value), repeatable");
}

hb::RunConfig resolve_config(const CommonArgs& args) {
    if (!args.config_path.empty() && !args.preset.empty()) {
        throw std::invalid_argument("give either --config or --preset, not both");
    }
    hb::RunConfig config;
    if (!args.config_path.empty()) {
        config = hb::load_config(args.config_path);
    } else if (!args.preset.empty()) {
        config = hb::load_config(hb::preset_path(args.preset));
    }
    for (const std::string& assignment : args.overrides) {
        hb::apply_override(config, assignment);
    }
    if (args.seed_given) config.seed = args.seed;
    return config;
}

fs::path ensure_out_dir(const CommonArgs& args) {
    fs::path dir(args.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_line(std::ofstream& out, const char* fmt, auto... values) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), fmt, values...);
    out << buf;
}

int cmd_modes(const CommonArgs& args) {
    const hb::RunConfig config = resolve_config(args);
    const hb::BeamModel model = hb::assemble(config.geometry(), config.gamma_h);
    const hb::ModalResult modes = hb::modal_analysis(model, config.n_modes);

    const fs::path out_path = ensure_out_dir(args) / "modes.csv";
    std::ofstream out(out_path, std::ios::binary);
    out << "mode,frequency_hz\n";
    for (int i = 0; i < modes.frequencies_hz.size(); ++i) {
        write_line(out, "%d,%.17g\n", i + 1, modes.frequencies_hz[i]);
        std::printf("mode %d: %.4f Hz\n", i + 1, modes.frequencies_hz[i]);
    }
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    const hb::RunConfig config = resolve_config(args);
    const hb::BeamModel model = hb::assemble(config.geometry(), config.gamma_h);

    hb::SimulateOptions opt;
    opt.h = config.h;
    opt.T = config.T;
    opt.stride = config.stride;
    Eigen::RowVectorXd out_row = Eigen::RowVectorXd::Zero(model.M.rows());
    out_row[model.tip_dof()] = 1.0;

    const hb::SecondOrderSystem sys{model.M, model.K, {}, model.A, model.B};
    const hb::Trajectory traj =
        hb::simulate(sys, config.params(), config.make_forcing(model),
                     config.make_ic(model), opt, out_row);

    const fs::path out_path = ensure_out_dir(args) / "trajectory.csv";
    hb::write_csv(traj, out_path);
    std::printf("wrote %s (%zu samples)\n", out_path.c_str(), traj.size());

    if (config.decay_t1 > 0.0 && config.decay_t2 > config.decay_t1) {
        const double slope = hb::decay_slope(traj, config.decay_t1, config.decay_t2);
        std::printf("decay slope over [%g, %g]: %.4f\n", config.decay_t1,
                    config.decay_t2, slope);
    }
    return 0;
}

int cmd_converge(const CommonArgs& args) {
    const hb::RunConfig config = resolve_config(args);
    if (config.conv_pow_min - config.conv_pow_max + 1 < 3) {
        throw std::invalid_argument("converge: at least 3 step sizes required");
    }
    const hb::BeamModel model = hb::assemble(config.geometry(), config.gamma_h);
    Eigen::RowVectorXd out_row = Eigen::RowVectorXd::Zero(model.M.rows());
    out_row[model.tip_dof()] = 1.0;
    const hb::SecondOrderSystem sys{model.M, model.K, {}, model.A, model.B};

    const hb::ConvergenceReport report = hb::convergence_study(
        sys, config.params(), config.make_forcing(model), config.make_ic(model),
        config.T, config.conv_pow_min, config.conv_pow_max, out_row,
        /*n_instants=*/128, config.conv_tau, config.conv_fit_begin,
        config.conv_fit_end);

    const fs::path dir = ensure_out_dir(args);
    std::ofstream out(dir / "converge.csv", std::ios::binary);
    out << "h,e_rms,e_tau\n";
    for (std::size_t i = 0; i < report.h_values.size(); ++i) {
        write_line(out, "%.17g,%.17g,%.17g\n", report.h_values[i],
                   report.e_rms[i], report.e_tau[i]);
    }
    std::ofstream summary(dir / "converge_summary.txt", std::ios::binary);
    summary << "h sweep: 2^" << config.conv_pow_min << " .. 2^"
            << config.conv_pow_max << "\n"
            << "fit window indices: [" << report.fit_begin << ", "
            << report.fit_end << ")\n"
            << "e_rms slope: " << report.rms_slope << "\n"
            << "e_tau slope: " << report.tau_slope << "\n";
    std::printf("e_rms slope %.3f, e_tau slope %.3f\n", report.rms_slope,
                report.tau_slope);
    return 0;
}

int cmd_rom_build(const CommonArgs& args) {
    const hb::RunConfig config = resolve_config(args);
    const hb::BeamModel model = hb::assemble(config.geometry(), config.gamma_h);
    const hb::BoucWenParams params = config.params();

    std::printf("generating %d snapshot runs (n_e = %d, workers = %d)...\n",
                config.rom_runs, config.n_elements, args.workers);
    const hb::SnapshotSet snapshots = hb::generate_snapshots(
        model, params, config.rom_r, config.rom_runs, config.rom_samples,
        config.rom_T, config.rom_h, config.rom_ic_scale, config.seed,
        args.workers);

    const fs::path dir = ensure_out_dir(args);
    hb::save_snapshots(snapshots, dir / "snapshots.bwz");
    std::printf("wrote %s\n", (dir / "snapshots.bwz").c_str());

    const hb::Rom rom =
        hb::build_rom(model, params, snapshots, config.rom_r, config.rom_m);
    hb::save_rom(rom, dir / "rom.bwr");
    std::printf("wrote %s (r = %d, m = %d)\n", (dir / "rom.bwr").c_str(),
                rom.r(), rom.m());

    std::ofstream sel(dir / "selection.csv", std::ios::binary);
    sel << "order,gauss_index,gauss_x\n";
    for (std::size_t i = 0; i < rom.indices.size(); ++i) {
        write_line(sel, "%zu,%lld,%.17g\n", i + 1,
                   static_cast<long long>(rom.indices[i]),
                   model.gauss_x[static_cast<Eigen::Index>(rom.indices[i])]);
    }
    return 0;
}

int cmd_rom_eval(const CommonArgs& args, const std::string& snapshots_path) {
    const hb::RunConfig config = resolve_config(args);
    const hb::BeamModel model = hb::assemble(config.geometry(), config.gamma_h);
    const hb::BoucWenParams params = config.params();
    const fs::path dir = ensure_out_dir(args);

    const fs::path snap_file = snapshots_path.empty()
                                   ? dir / "snapshots.bwz"
                                   : fs::path(snapshots_path);
    const hb::SnapshotSet snapshots = hb::load_snapshots(snap_file);

    // Held-out evaluation run of the full model.
    const double eval_scale = config.rom_eval_ic_scale > 0.0
                                  ? config.rom_eval_ic_scale
                                  : config.rom_ic_scale;
    const hb::SimState ic = hb::random_modal_ic(model, config.rom_r, eval_scale,
                                                config.rom_eval_seed);
    Eigen::RowVectorXd out_row = Eigen::RowVectorXd::Zero(model.M.rows());
    out_row[model.tip_dof()] = 1.0;
    const hb::SecondOrderSystem sys{model.M, model.K, {}, model.A, model.B};
    hb::SimulateOptions opt;
    opt.h = config.rom_h;
    opt.T = config.rom_T;
    opt.stride = 1;
    std::printf("running full model (n_e = %d) for the held-out IC...\n",
                config.n_elements);
    const hb::Trajectory full = hb::simulate(sys, params, {}, ic, opt, out_row);

    // Baseline: ROM output identically zero.
    hb::Trajectory zero = full;
    std::fill(zero.tip.begin(), zero.tip.end(), 0.0);
    const double baseline = hb::rms_difference(zero, full);

    const hb::ModalProjection basis = hb::project_modal(model, config.rom_r);
    const Eigen::VectorXd xi0 = basis.R.transpose() * model.M * ic.q;
    const Eigen::VectorXd xidot0 = Eigen::VectorXd::Zero(config.rom_r);

    std::ofstream out(dir / "rom_eval.csv", std::ios::binary);
    out << "m,E_rms\n";
    write_line(out, "0,%.17g\n", baseline);
    std::printf("baseline E_rms (zero ROM output): %.6g\n", baseline);

    for (int m : config.rom_m_list) {
        const hb::Rom rom = hb::build_rom(model, params, snapshots, config.rom_r, m);
        const hb::Trajectory reduced = hb::simulate_rom(
            rom, {}, xi0, xidot0, config.rom_h, config.rom_T, 1, model.tip_dof());
        const double e = hb::rms_difference(reduced, full);
        write_line(out, "%d,%.17g\n", m, e);
        std::printf("m = %4d: E_rms = %.6g\n", m, e);
    }
    std::printf("wrote %s\n", (dir / "rom_eval.csv").c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cantilever beam with distributed Bouc-Wen hysteretic damping: "
                 "semi-implicit simulation and data-driven model reduction"};
    app.require_subcommand(1);

    CommonArgs modes_args, sim_args, conv_args, build_args, eval_args;
    std::string snapshots_path;

    add_common(app.add_subcommand("modes", "Natural frequencies"), modes_args);
    add_common(app.add_subcommand("simulate", "Time-domain simulation"), sim_args);
    add_common(app.add_subcommand("converge", "Step-size convergence study"),
               conv_args);
    CLI::App* rom = app.add_subcommand("rom", "Reduced-order models");
    rom->require_subcommand(1);
    add_common(rom->add_subcommand("build", "Generate snapshots and build a ROM"),
               build_args);
    CLI::App* rom_eval =
        rom->add_subcommand("eval", "Evaluate ROM error against the full model");
    add_common(rom_eval, eval_args);
    rom_eval->add_option("--snapshots", snapshots_path,
                         "Snapshot container (default <out>/snapshots.bwz)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("modes")) return cmd_modes(modes_args);
        if (app.got_subcommand("simulate")) return cmd_simulate(sim_args);
        if (app.got_subcommand("converge")) return cmd_converge(conv_args);
        if (rom->got_subcommand("build")) return cmd_rom_build(build_args);
        if (rom->got_subcommand("eval")) return cmd_rom_eval(eval_args, snapshots_path);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
