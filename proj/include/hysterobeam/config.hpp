#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hysterobeam/beam.hpp"
#include "hysterobeam/hysteresis.hpp"
#include "hysterobeam/integrator.hpp"

namespace hysterobeam {

/// Initial-condition recipe, all variants deterministic given the seed.
struct IcSpec {
    enum class Type {
        kZero,
        kModalCoeffs,  // explicit modal coordinates, velocities zero
        kModalTip,     // per-mode static tip contributions [m]
        kRandomModal,  // uniform [-1,1] coordinates scaled to tip_scale
    };
    Type type = Type::kZero;
    std::vector<double> coeffs;  // kModalCoeffs / kModalTip
    int modes = 3;               // kRandomModal
    double tip_scale = 0.06;     // kRandomModal: static tip bound [m]
    std::uint64_t seed = 1;      // kRandomModal
};

struct ForcingSpec {
    enum class Type { kNone, kTipSine };
    Type type = Type::kNone;
    double amplitude = 0.0;     // [N]
    double frequency_hz = 0.0;  // [Hz]
};

/// Flat key-value run configuration (INI sections). Unknown keys are
/// rejected at parse time; domain constraints are validated before any
/// computation starts.
struct RunConfig {
    // [beam]
    double length = 1.0;
    double EI = 2666.7;
    double rhoA = 3.14;
    int n_elements = 10;
    int n_gauss = 3;

    // [bouc_wen]
    double A_bar = 0.065;
    double alpha = 0.8;
    double beta = 0.5;
    double n_h = 0.5;
    double gamma_h = 3000.0;

    // [integrator]
    double h = 1e-4;
    double T = 1.0;
    int stride = 1;

    // [ic]
    IcSpec ic;

    // [forcing]
    ForcingSpec forcing;

    // [modes]
    int n_modes = 5;

    // [converge]
    int conv_pow_min = -10;   // h sweep: 2^pow_min down to 2^pow_max
    int conv_pow_max = -18;
    int conv_fit_begin = 0;   // slope-fit window into the h list
    int conv_fit_end = -1;
    double conv_tau = 1.0;

    // [decay]
    double decay_t1 = 0.0;    // slope-fit window; 0 = unset
    double decay_t2 = 0.0;

    // [rom]
    int rom_r = 3;
    int rom_runs = 60;         // N_s
    int rom_samples = 1000;    // N_t
    double rom_T = 1.0;
    double rom_h = 1e-4;
    double rom_ic_scale = 0.06;
    int rom_m = 100;
    std::vector<int> rom_m_list = {10, 25, 50, 100, 150, 200};
    std::uint64_t rom_eval_seed = 1000;
    double rom_eval_ic_scale = 0.0;  // 0 = use rom_ic_scale

    std::uint64_t seed = 1;

    BeamGeometry geometry() const;
    BoucWenParams params() const;
    /// Builds the initial state for an assembled model (modal quantities need
    /// the basis).
    SimState make_ic(const BeamModel& model) const;
    Forcing make_forcing(const BeamModel& model) const;
};

/// Parses an INI-style flat key-value file ('#' or ';' comments, [sections],
/// key = value). Unknown sections or keys raise std::invalid_argument with
/// the offending name.
RunConfig load_config(const std::filesystem::path& path);

/// Applies one `section.key=value` override string to a config.
void apply_override(RunConfig& config, const std::string& assignment);

/// Resolves a preset name to a config file: `$HYSTEROBEAM_PRESETS/<name>.ini`
/// when the environment variable is set, otherwise `presets/<name>.ini`
/// relative to the current directory.
std::filesystem::path preset_path(const std::string& name);

}  // namespace hysterobeam
