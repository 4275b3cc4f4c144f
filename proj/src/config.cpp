#include "hysterobeam/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hysterobeam/prng.hpp"

namespace hysterobeam {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        cell = trim(cell);
        if (!cell.empty()) out.push_back(std::stod(cell));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (double v : parse_double_list(s)) out.push_back(static_cast<int>(v));
    return out;
}

void set_key(RunConfig& c, const std::string& section, const std::string& key,
             const std::string& value) {
    const std::string full = section + "." + key;
    auto as_double = [&] { return std::stod(value); };
    auto as_int = [&] { return std::stoi(value); };
    auto as_u64 = [&] { return static_cast<std::uint64_t>(std::stoull(value)); };

    if (full == "beam.length") c.length = as_double();
    else if (full == "beam.EI") c.EI = as_double();
    else if (full == "beam.rhoA") c.rhoA = as_double();
    else if (full == "beam.n_elements") c.n_elements = as_int();
    else if (full == "beam.n_gauss") c.n_gauss = as_int();
    else if (full == "bouc_wen.A_bar") c.A_bar = as_double();
    else if (full == "bouc_wen.alpha") c.alpha = as_double();
    else if (full == "bouc_wen.beta") c.beta = as_double();
    else if (full == "bouc_wen.n_h") c.n_h = as_double();
    else if (full == "bouc_wen.gamma_h") c.gamma_h = as_double();
    else if (full == "integrator.h") c.h = as_double();
    else if (full == "integrator.T") c.T = as_double();
    else if (full == "integrator.stride") c.stride = as_int();
    else if (full == "ic.type") {
        if (value == "zero") c.ic.type = IcSpec::Type::kZero;
        else if (value == "modal_coeffs") c.ic.type = IcSpec::Type::kModalCoeffs;
        else if (value == "modal_tip") c.ic.type = IcSpec::Type::kModalTip;
        else if (value == "random_modal") c.ic.type = IcSpec::Type::kRandomModal;
        else throw std::invalid_argument("unknown ic.type: " + value);
    }
    else if (full == "ic.coeffs") c.ic.coeffs = parse_double_list(value);
    else if (full == "ic.modes") c.ic.modes = as_int();
    else if (full == "ic.tip_scale") c.ic.tip_scale = as_double();
    else if (full == "ic.seed") c.ic.seed = as_u64();
    else if (full == "forcing.type") {
        if (value == "none") c.forcing.type = ForcingSpec::Type::kNone;
        else if (value == "tip_sine") c.forcing.type = ForcingSpec::Type::kTipSine;
        else throw std::invalid_argument("unknown forcing.type: " + value);
    }
    else if (full == "forcing.amplitude") c.forcing.amplitude = as_double();
    else if (full == "forcing.frequency_hz") c.forcing.frequency_hz = as_double();
    else if (full == "modes.count") c.n_modes = as_int();
    else if (full == "converge.pow_min") c.conv_pow_min = as_int();
    else if (full == "converge.pow_max") c.conv_pow_max = as_int();
    else if (full == "converge.fit_begin") c.conv_fit_begin = as_int();
    else if (full == "converge.fit_end") c.conv_fit_end = as_int();
    else if (full == "converge.tau") c.conv_tau = as_double();
    else if (full == "decay.t1") c.decay_t1 = as_double();
    else if (full == "decay.t2") c.decay_t2 = as_double();
    else if (full == "rom.r") c.rom_r = as_int();
    else if (full == "rom.runs") c.rom_runs = as_int();
    else if (full == "rom.samples") c.rom_samples = as_int();
    else if (full == "rom.T") c.rom_T = as_double();
    else if (full == "rom.h") c.rom_h = as_double();
    else if (full == "rom.ic_scale") c.rom_ic_scale = as_double();
    else if (full == "rom.m") c.rom_m = as_int();
    else if (full == "rom.m_list") c.rom_m_list = parse_int_list(value);
    else if (full == "rom.eval_seed") c.rom_eval_seed = as_u64();
    else if (full == "rom.eval_ic_scale") c.rom_eval_ic_scale = as_double();
    else if (full == "run.seed") c.seed = as_u64();
    else throw std::invalid_argument("unknown config key: " + full);
}

}  // namespace

BeamGeometry RunConfig::geometry() const {
    return BeamGeometry(length, EI, rhoA, n_elements, n_gauss);
}

BoucWenParams RunConfig::params() const {
    return BoucWenParams(A_bar, alpha, beta, n_h, gamma_h);
}

SimState RunConfig::make_ic(const BeamModel& model) const {
    const auto n = model.M.rows();
    SimState state;
    state.q = Eigen::VectorXd::Zero(n);
    state.v = Eigen::VectorXd::Zero(n);
    state.z = Eigen::VectorXd::Zero(model.B.rows());
    if (ic.type == IcSpec::Type::kZero) return state;

    const int n_modes_needed =
        ic.type == IcSpec::Type::kRandomModal
            ? ic.modes
            : static_cast<int>(ic.coeffs.size());
    if (n_modes_needed < 1 || n_modes_needed > n) {
        throw std::invalid_argument("ic: mode count out of range");
    }
    const ModalResult modes = modal_analysis(model, n_modes_needed);
    const int tip = model.tip_dof();

    Eigen::VectorXd xi(n_modes_needed);
    switch (ic.type) {
        case IcSpec::Type::kModalCoeffs:
            for (int j = 0; j < n_modes_needed; ++j) xi[j] = ic.coeffs[static_cast<std::size_t>(j)];
            break;
        case IcSpec::Type::kModalTip:
            // coeffs[j] is the static tip displacement contributed by mode j.
            for (int j = 0; j < n_modes_needed; ++j) {
                xi[j] = ic.coeffs[static_cast<std::size_t>(j)] / modes.R(tip, j);
            }
            break;
        case IcSpec::Type::kRandomModal: {
            double tip_reach = 0.0;
            for (int j = 0; j < n_modes_needed; ++j) tip_reach += std::abs(modes.R(tip, j));
            SplitMix64 rng(ic.seed);
            for (int j = 0; j < n_modes_needed; ++j) {
                xi[j] = ic.tip_scale / tip_reach * rng.uniform_sym();
            }
            break;
        }
        case IcSpec::Type::kZero:
            break;
    }
    state.q = modes.R * xi;
    return state;
}

Forcing RunConfig::make_forcing(const BeamModel& model) const {
    Forcing f;
    if (forcing.type == ForcingSpec::Type::kNone) return f;
    const auto n = model.M.rows();
    const int tip = model.tip_dof();
    const double amp = forcing.amplitude;
    const double omega = 2.0 * std::numbers::pi * forcing.frequency_hz;
    f.value = [n, tip, amp, omega](double t) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
        out[tip] = amp * std::sin(omega * t);
        return out;
    };
    f.derivative = [n, tip, amp, omega](double t) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
        out[tip] = amp * omega * std::cos(omega * t);
        return out;
    };
    return f;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_config: cannot open " + path.string());
    }
    RunConfig config;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::invalid_argument(path.string() + ":" +
                                            std::to_string(line_no) +
                                            ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path.string() + ":" +
                                        std::to_string(line_no) +
                                        ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            set_key(config, section, key, value);
        } catch (const std::exception& err) {
            throw std::invalid_argument(path.string() + ":" +
                                        std::to_string(line_no) + ": " +
                                        err.what());
        }
    }
    return config;
}

void apply_override(RunConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw std::invalid_argument("override must look like section.key=value: " +
                                    assignment);
    }
    set_key(config, trim(assignment.substr(0, dot)),
            trim(assignment.substr(dot + 1, eq - dot - 1)),
            trim(assignment.substr(eq + 1)));
}

std::filesystem::path preset_path(const std::string& name) {
    if (name.find('/') != std::string::npos ||
        name.find("..") != std::string::npos) {
        throw std::invalid_argument("preset names cannot contain path separators");
    }
    const char* dir = std::getenv("HYSTEROBEAM_PRESETS");
    const std::filesystem::path base = dir != nullptr ? dir : "presets";
    return base / (name + ".ini");
}

}  // namespace hysterobeam
