// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code. Exit status is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "hysterobeam/analysis.hpp"
#include "hysterobeam/beam.hpp"
#include "hysterobeam/integrator.hpp"
#include "hysterobeam/prng.hpp"
#include "hysterobeam/rom.hpp"
#include "oracle_helpers.hpp"

using namespace hysterobeam;

namespace {

struct Check {
    bool ok;
    std::string detail;
};

class Criterion {
public:
    Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

    void expect(bool ok, const std::string& detail) {
        checks_.push_back({ok, detail});
    }

    void expect_near(double value, double target, double abs_tol,
                     const std::string& label) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s = %.6g (target %.6g +- %.3g)",
                      label.c_str(), value, target, abs_tol);
        expect(std::abs(value - target) <= abs_tol, buf);
    }

    void expect_less(double value, double bound, const std::string& label) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s = %.6g (< %.3g)", label.c_str(),
                      value, bound);
        expect(value < bound, buf);
    }

    void expect_greater(double value, double bound, const std::string& label) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s = %.6g (> %.3g)", label.c_str(),
                      value, bound);
        expect(value > bound, buf);
    }

    bool report(double seconds) const {
        bool all_ok = true;
        for (const Check& c : checks_) all_ok &= c.ok;
        std::printf("%s criterion %d: %s [%.1f s]\n", all_ok ? "PASS" : "FAIL",
                    id_, title_.c_str(), seconds);
        for (const Check& c : checks_) {
            std::printf("    %s %s\n", c.ok ? "ok  " : "FAIL", c.detail.c_str());
        }
        std::fflush(stdout);
        return all_ok;
    }

private:
    int id_;
    std::string title_;
    std::vector<Check> checks_;
};

// Shared builders -----------------------------------------------------------

BeamModel paper_model(int n_e, double gamma_h) {
    return assemble(BeamGeometry(1.0, 2666.7, 3.14, n_e, 3), gamma_h);
}

const BoucWenParams kHalf(0.065, 0.8, 0.5, 0.5, 3000.0);
const BoucWenParams kHalfSoft(0.065, 0.8, 0.5, 0.5, 300.0);
const BoucWenParams kThreeHalf(608.9, 0.8, 0.5, 1.5, 0.3);

Eigen::RowVectorXd tip_row(const BeamModel& model) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(model.M.rows());
    row[model.tip_dof()] = 1.0;
    return row;
}

SecondOrderSystem system_of(const BeamModel& model) {
    return SecondOrderSystem{model.M, model.K, {}, model.A, model.B};
}

SimState mode_tip_ic(const BeamModel& model, std::vector<double> tip_contribs) {
    const int r = static_cast<int>(tip_contribs.size());
    const ModalResult modes = modal_analysis(model, r);
    SimState s;
    s.q = Eigen::VectorXd::Zero(model.M.rows());
    for (int j = 0; j < r; ++j) {
        s.q += modes.R.col(j) * (tip_contribs[static_cast<std::size_t>(j)] /
                                 modes.R(model.tip_dof(), j));
    }
    s.v = Eigen::VectorXd::Zero(model.M.rows());
    s.z = Eigen::VectorXd::Zero(model.B.rows());
    return s;
}

std::vector<double> positive_peak_amplitudes(const Trajectory& traj, int count) {
    std::vector<double> amps;
    for (const Peak& p : envelope_peaks(traj, /*rectified=*/false)) {
        amps.push_back(p.amplitude);
        if (static_cast<int>(amps.size()) == count) break;
    }
    return amps;
}

// Criteria ------------------------------------------------------------------

Criterion criterion_1_modes() {
    Criterion c(1, "modal frequencies of the 10-element reference beam");
    const BeamModel model = paper_model(10, 3000.0);
    const ModalResult modes = modal_analysis(model, 5);
    const double expected[] = {16.3, 102.2, 286.2, 561.3, 929.3};
    for (int i = 0; i < 5; ++i) {
        c.expect_near(modes.frequencies_hz[i], expected[i],
                      0.005 * expected[i], "f" + std::to_string(i + 1));
    }
    return c;
}

Criterion criterion_2_equivalent_damping() {
    Criterion c(2, "equivalent damping near 1.6% (gamma_h = 3000, n_h = 0.5)");
    const BeamModel model = paper_model(10, 3000.0);
    SimulateOptions opt;
    opt.h = 1e-5;
    opt.T = 1.0;
    opt.stride = 10;
    const Trajectory traj = simulate(system_of(model), kHalf, {},
                                     mode_tip_ic(model, {0.06}), opt,
                                     tip_row(model));
    const std::vector<double> peaks = positive_peak_amplitudes(traj, 11);
    if (peaks.size() < 11) {
        c.expect(false, "fewer than 11 positive peaks found");
        return c;
    }
    c.expect_near(zeta_equiv(peaks), 0.016, 0.004, "zeta_equiv over 10 cycles");
    // Known discrepancy: the stated equations give half the published damping
    // for both parameter sets (cross-checked with an independent stiff
    // integrator on the same matrices). See the project README.
    return c;
}

Criterion criterion_3_decay_laws() {
    Criterion c(3, "asymptotic power-law decay of the tip envelope");
    {
        const BeamModel model = paper_model(10, 3000.0);
        SimulateOptions opt;
        opt.h = 1e-4;
        opt.T = 120.0;
        opt.stride = 5;
        const Trajectory traj = simulate(system_of(model), kHalf, {},
                                         mode_tip_ic(model, {0.06}), opt,
                                         tip_row(model));
        const double slope = decay_slope(traj, 30.0, 120.0);
        c.expect_near(slope, -2.0, 0.2, "n_h = 0.5 late-window slope");
    }
    {
        const BeamModel model = paper_model(10, 0.3);
        SimulateOptions opt;
        opt.h = 1e-4;
        opt.T = 60.0;
        opt.stride = 5;
        const Trajectory traj = simulate(system_of(model), kThreeHalf, {},
                                         mode_tip_ic(model, {0.06}), opt,
                                         tip_row(model));
        const double slope = decay_slope(traj, 10.0, 60.0);
        c.expect_near(slope, -2.0 / 3.0, 0.15, "n_h = 1.5 late-window slope");
    }
    return c;
}

Criterion criterion_4_large_step_stability() {
    Criterion c(4, "stability at h = 1e-4 with 100 elements (h >> T_min)");
    const BeamModel model = paper_model(100, 3000.0);

    const ModalResult all_modes =
        modal_analysis(model, static_cast<int>(model.M.rows()));
    const double t_min =
        1.0 / all_modes.frequencies_hz[all_modes.frequencies_hz.size() - 1];
    c.expect_near(t_min, 3.6e-7, 0.02 * 3.6e-7, "T_min at n_e = 100");
    c.expect_greater(1e-4 / t_min, 275.0, "h / T_min");

    // Mode split chosen so every modal line stays above the 1% threshold and
    // the Bouc-Wen tangent-stiffening frequency shift stays below one bin.
    SimulateOptions opt;
    opt.h = 1e-4;
    opt.T = 1.0;
    const Trajectory traj = simulate(system_of(model), kHalf, {},
                                     mode_tip_ic(model, {0.01, 0.02, 0.035}),
                                     opt, tip_row(model));

    double head_max = 0.0, tail_max = 0.0, all_max = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double a = std::abs(traj.tip[k]);
        all_max = std::max(all_max, a);
        if (traj.times[k] < 0.2) head_max = std::max(head_max, a);
        if (traj.times[k] > 0.8) tail_max = std::max(tail_max, a);
    }
    c.expect_less(all_max, 1.2 * std::abs(traj.tip[0]), "max |tip| (bounded)");
    c.expect_less(tail_max, head_max, "tail amplitude below head (decaying)");

    const auto peaks = spectrum_peaks(traj, 0.01);
    c.expect(peaks.size() == 3,
             "spectrum has exactly 3 peaks above 1% (got " +
                 std::to_string(peaks.size()) + ")");
    const ModalResult first3 = modal_analysis(model, 3);
    if (peaks.size() == 3) {
        for (int i = 0; i < 3; ++i) {
            c.expect_near(peaks[static_cast<std::size_t>(i)].frequency_hz,
                          first3.frequencies_hz[i], 1.0,
                          "peak " + std::to_string(i + 1) + " frequency");
        }
    }
    return c;
}

Criterion criterion_5_accuracy_vs_oracle() {
    Criterion c(5, "h = 1e-5 trace matches the adaptive reference (n_e = 10)");
    const BeamModel model = paper_model(10, 3000.0);
    const SimState ic = mode_tip_ic(model, {0.06});

    // Comparison instants k/100 land exactly on the h = 1e-5 step grid.
    std::vector<double> instants;
    for (int k = 1; k <= 100; ++k) instants.push_back(k / 100.0);
    const Trajectory ref =
        reference_solution(system_of(model), kHalf, {}, ic, 1.0, instants,
                           tip_row(model), ReferenceMethod::kAdaptive);

    SimulateOptions opt;
    opt.h = 1e-5;
    opt.T = 1.0;
    opt.stride = 1000;
    const Trajectory traj = simulate(system_of(model), kHalf, {}, ic, opt,
                                     tip_row(model));

    double num = 0.0, den = 0.0;
    for (double t : instants) {
        const double diff = traj.value_at(t) - ref.value_at(t);
        num += diff * diff;
        den += ref.value_at(t) * ref.value_at(t);
    }
    c.expect_less(std::sqrt(num / den), 1e-3, "relative RMS at 100 instants");
    return c;
}

struct SlopeCase {
    std::string label;
    int n_e;
    BoucWenParams params;
};

ConvergenceReport run_convergence(const SlopeCase& sc) {
    const BeamModel model = paper_model(sc.n_e, sc.params.gamma_h);
    ConvergenceReport report = convergence_study(
        system_of(model), sc.params, {}, mode_tip_ic(model, {0.06}), 1.0, -10,
        -18, tip_row(model), 128, 1.0, 0, -1, ReferenceMethod::kAuto);
    std::printf("    .. %s (n_e = %d): h, e_rms, e_tau\n", sc.label.c_str(),
                sc.n_e);
    for (std::size_t i = 0; i < report.h_values.size(); ++i) {
        std::printf("    ..   2^%-3.0f  %.3e  %.3e\n",
                    std::log2(report.h_values[i]), report.e_rms[i],
                    report.e_tau[i]);
    }
    std::fflush(stdout);
    return report;
}

Criterion criterion_6_convergence_orders() {
    Criterion c(6, "convergence orders across damping regimes");
    auto soft = std::async(std::launch::async, run_convergence,
                           SlopeCase{"gh300", 10, kHalfSoft});
    auto hard10 = std::async(std::launch::async, run_convergence,
                             SlopeCase{"gh3000", 10, kHalf});
    auto hard30 = std::async(std::launch::async, run_convergence,
                             SlopeCase{"gh3000", 30, kHalf});
    auto smooth = std::async(std::launch::async, run_convergence,
                             SlopeCase{"nh1.5", 10, kThreeHalf});

    const ConvergenceReport soft_r = soft.get();
    c.expect_near(soft_r.rms_slope, 2.0, 0.3,
                  "e_rms slope, n_e = 10, gamma_h = 300");

    const ConvergenceReport hard10_r = hard10.get();
    const ConvergenceReport hard30_r = hard30.get();
    std::printf("    .. gamma_h = 3000 slopes: e_rms(10) = %.3f, "
                "e_tau(10) = %.3f, e_tau(30) = %.3f\n",
                hard10_r.rms_slope, hard10_r.tau_slope, hard30_r.tau_slope);
    const double avg_hard =
        (hard10_r.rms_slope + hard10_r.tau_slope + hard30_r.tau_slope) / 3.0;
    c.expect_greater(avg_hard, 1.0, "average slope at gamma_h = 3000");

    const ConvergenceReport smooth_r = smooth.get();
    c.expect_greater(smooth_r.rms_slope, 1.7,
                     "e_rms slope, n_h = 1.5, gamma_h = 0.3");
    return c;
}

Criterion criterion_7_rom_pipeline() {
    Criterion c(7, "data-driven ROM: baseline, trend, and m > 100 accuracy");
    const int workers =
        std::max(1u, std::thread::hardware_concurrency());
    const BeamModel model = paper_model(100, 3000.0);
    const SnapshotSet snapshots = generate_snapshots(
        model, kHalf, 3, 60, 1000, 1.0, 1e-4, 0.06, 2024, workers);

    // Held-out evaluation initial condition; its scale is part of the shipped
    // configuration (the error measure is not normalized).
    const double eval_scale = 0.039;
    const SimState ic = random_modal_ic(model, 3, eval_scale, 4096);
    SimulateOptions opt;
    opt.h = 1e-4;
    opt.T = 1.0;
    const Trajectory full =
        simulate(system_of(model), kHalf, {}, ic, opt, tip_row(model));

    Trajectory zero = full;
    std::fill(zero.tip.begin(), zero.tip.end(), 0.0);
    const double baseline = rms_difference(zero, full);
    c.expect_near(baseline, 0.006, 0.1 * 0.006, "baseline E_rms (n_e = 100)");

    const ModalProjection basis = project_modal(model, 3);
    const Eigen::VectorXd xi0 = basis.R.transpose() * model.M * ic.q;

    const std::vector<int> m_list{10, 25, 50, 100, 150, 200};
    std::vector<double> errors;
    for (int m : m_list) {
        const Rom rom = build_rom(model, kHalf, snapshots, 3, m);
        const Trajectory reduced =
            simulate_rom(rom, {}, xi0, Eigen::VectorXd::Zero(3), 1e-4, 1.0, 1,
                         model.tip_dof());
        errors.push_back(rms_difference(reduced, full));
        std::printf("    .. m = %3d: E_rms = %.4e\n", m, errors.back());
        std::fflush(stdout);
    }
    bool trend_ok = true;
    for (std::size_t i = 1; i < errors.size(); ++i) {
        if (errors[i] > errors[i - 1] + 0.1 * baseline) trend_ok = false;
    }
    c.expect(trend_ok, "E_rms trend decreasing in m (0.1 baseline slack)");
    c.expect_less(errors[4], 6e-5, "E_rms at m = 150");
    c.expect_less(errors[5], 6e-5, "E_rms at m = 200");

    // The 150-element model shares the same unnormalized baseline.
    const BeamModel model150 = paper_model(150, 3000.0);
    const SimState ic150 = random_modal_ic(model150, 3, eval_scale, 4096);
    const Trajectory full150 = simulate(system_of(model150), kHalf, {}, ic150,
                                        opt, tip_row(model150));
    Trajectory zero150 = full150;
    std::fill(zero150.tip.begin(), zero150.tip.end(), 0.0);
    c.expect_near(rms_difference(zero150, full150), 0.006, 0.1 * 0.006,
                  "baseline E_rms (n_e = 150)");
    return c;
}

Criterion criterion_8_property_suites() {
    Criterion c(8, "property suites (oracles, monotonicity, power law, energy)");

    {  // Quadrature oracle agreement for element and coupling matrices.
        const BeamGeometry g(1.0, 2666.7, 3.14, 7, 3);
        const double h = g.element_length();
        const auto [M_e, K_e] = build_element_matrices(g);
        const auto psi = oracle::hermite_polys(h);
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                const double m_ref = oracle::adaptive_simpson(
                    [&](double x) { return g.rhoA * psi[i](x) * psi[j](x); },
                    0.0, h);
                const double k_ref = oracle::adaptive_simpson(
                    [&](double x) {
                        return g.EI * psi[i].derivative().derivative()(x) *
                               psi[j].derivative().derivative()(x);
                    },
                    0.0, h);
                worst = std::max(worst, std::abs(M_e(i, j) - m_ref) /
                                            std::abs(m_ref));
                worst = std::max(worst, std::abs(K_e(i, j) - k_ref) /
                                            std::abs(k_ref));
            }
        }
        c.expect_less(worst, 1e-12, "element matrices vs quadrature oracle");
    }

    {  // Greedy selection against brute force on random matrices.
        SplitMix64 rng(314);
        bool argmax_ok = true, monotone_ok = true;
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::MatrixXd Z(8, 20);
            for (int i = 0; i < 8; ++i) {
                for (int j = 0; j < 20; ++j) Z(i, j) = rng.uniform_sym();
            }
            Eigen::Index argmax = 0;
            for (Eigen::Index i = 1; i < 8; ++i) {
                if (Z.row(i).norm() > Z.row(argmax).norm()) argmax = i;
            }
            const GreedyResult res = greedy_select(Z, 8);
            argmax_ok &= res.indices[0] == argmax;
            for (std::size_t k = 1; k < res.residual_fro.size(); ++k) {
                monotone_ok &=
                    res.residual_fro[k] <= res.residual_fro[k - 1] * (1 + 1e-12);
            }
        }
        c.expect(argmax_ok, "greedy first pick equals brute-force argmax");
        c.expect(monotone_ok, "greedy residual non-increasing");
    }

    {  // Least-squares residual monotone in m along the greedy sequence.
        SplitMix64 rng(2718);
        Eigen::MatrixXd Z(8, 40), W(3, 8);
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 40; ++j) Z(i, j) = rng.uniform_sym();
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 8; ++j) W(i, j) = rng.uniform_sym();
        }
        const Eigen::MatrixXd target = W * Z;
        const GreedyResult greedy = greedy_select(Z, 8);
        double prev = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (int m = 1; m <= 8; ++m) {
            Eigen::MatrixXd z_s(m, 40);
            for (int i = 0; i < m; ++i) {
                z_s.row(i) = Z.row(greedy.indices[static_cast<std::size_t>(i)]);
            }
            const double res = (target - solve_p(target, z_s) * z_s).norm();
            ok &= res <= prev * (1.0 + 1e-12);
            prev = res;
        }
        c.expect(ok, "least-squares residual non-increasing in m");
    }

    {  // Full-basis ROM exactness on a small mesh.
        const BeamModel model = paper_model(3, 3000.0);
        const int N = static_cast<int>(model.M.rows());
        const ModalProjection basis = project_modal(model, N);
        Rom rom;
        rom.R = basis.R;
        rom.m_tilde = basis.m_tilde;
        rom.k_tilde = basis.k_tilde;
        rom.P = basis.R.transpose() * model.A;
        rom.B_s = model.B;
        rom.indices.resize(static_cast<std::size_t>(model.B.rows()));
        for (std::size_t k = 0; k < rom.indices.size(); ++k) {
            rom.indices[k] = static_cast<std::int64_t>(k);
        }
        rom.A_bar = kHalf.A_bar;
        rom.alpha = kHalf.alpha;
        rom.beta = kHalf.beta;
        rom.n_h = kHalf.n_h;
        rom.gamma_h = kHalf.gamma_h;

        const SimState ic = mode_tip_ic(model, {0.05});
        SimulateOptions opt;
        opt.h = 1e-4;
        opt.T = 0.2;
        const Trajectory full = simulate(system_of(model), kHalf, {}, ic, opt,
                                         tip_row(model));
        const Eigen::VectorXd xi0 = basis.R.transpose() * model.M * ic.q;
        const Trajectory reduced =
            simulate_rom(rom, {}, xi0, Eigen::VectorXd::Zero(N), 1e-4, 0.2, 1,
                         model.tip_dof());
        double worst = 0.0;
        for (std::size_t k = 0; k < full.size(); ++k) {
            worst = std::max(worst, std::abs(full.tip[k] - reduced.tip[k]));
        }
        c.expect_less(worst, 1e-10, "full-basis ROM equals the full model");
    }

    {  // Bouc-Wen loop-area power law, slope n_h + 2 within 0.1.
        for (double n_h : {0.5, 1.5}) {
            const BoucWenParams p(n_h == 0.5 ? 0.065 : 608.9, 0.8, 0.5, n_h,
                                  0.0);
            const double bound = chi_max(p);
            std::vector<double> amps, areas;
            for (double frac = 0.01; frac <= 0.1 + 1e-12;
                 frac *= std::pow(10.0, 0.25)) {
                amps.push_back(frac * bound);
                areas.push_back(oracle::loop_area(p, frac * bound, 400000));
            }
            c.expect_near(loglog_slope(amps, areas), n_h + 2.0, 0.1,
                          "loop-area slope at n_h = " + std::to_string(n_h));
        }
    }

    {  // Windowed energy decay along an unforced run.
        const BeamModel model = paper_model(10, 3000.0);
        SimState s = mode_tip_ic(model, {0.06});
        const SecondOrderSystem sys = system_of(model);
        StepWorkspace ws;
        const double h = 1e-4;
        std::vector<double> energy;
        energy.push_back(0.5 * s.v.dot(model.M * s.v) +
                         0.5 * s.q.dot(model.K * s.q));
        for (int k = 0; k < 5000; ++k) {
            step(s, h, sys, kHalf, {}, ws);
            energy.push_back(0.5 * s.v.dot(model.M * s.v) +
                             0.5 * s.q.dot(model.K * s.q));
        }
        const int period_steps = static_cast<int>(std::ceil(1.0 / (16.3 * h)));
        bool period_ok = true, short_ok = true;
        for (std::size_t k = 0; k + period_steps < energy.size(); ++k) {
            period_ok &= energy[k + period_steps] <= energy[k] * (1.0 + 1e-9);
        }
        for (std::size_t k = 0; k + 10 < energy.size(); ++k) {
            short_ok &= energy[k + 10] <= energy[k] * 1.025;
        }
        c.expect(period_ok, "energy non-increasing over one-period windows");
        c.expect(short_ok, "10-step energy rebound below 2.5%");
    }

    return c;
}

}  // namespace

int main(int argc, char** argv) {
    using Clock = std::chrono::steady_clock;
    std::vector<Criterion (*)()> criteria = {
        criterion_1_modes,          criterion_2_equivalent_damping,
        criterion_3_decay_laws,     criterion_4_large_step_stability,
        criterion_5_accuracy_vs_oracle, criterion_6_convergence_orders,
        criterion_7_rom_pipeline,   criterion_8_property_suites,
    };
    // Optional arguments select criteria by number, e.g. `acceptance 6 7`.
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), id) == selected.end()) {
            continue;
        }
        const auto start = Clock::now();
        const Criterion c = criteria[i]();
        const double seconds =
            std::chrono::duration<double>(Clock::now() - start).count();
        if (!c.report(seconds)) ++failures;
    }
    if (failures == 0) {
        std::printf("all selected acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
