#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "hysterobeam/integrator.hpp"
#include "hysterobeam/trajectory.hpp"

namespace hysterobeam {

/// RMS difference over the n_instants shared sample times t_k = k·T/n_instants
/// (k = 1..n_instants, T = final time of `reference`). Both trajectories must
/// contain every t_k exactly; a missing instant throws.
double rms_error(const Trajectory& traj, const Trajectory& reference,
                 int n_instants = 128);

/// |y(tau) - y_ref(tau)| at one shared sample instant.
double fixed_time_error(const Trajectory& traj, const Trajectory& reference,
                        double tau = 1.0);

/// RMS difference over every sample of two trajectories recorded on the same
/// grid (including t = 0). Used for the reduced-order-model error measure,
/// where the grid is the full fixed-step output.
double rms_difference(const Trajectory& a, const Trajectory& b);

/// Equivalent damping ratio from a run of successive positive peak amplitudes
/// A_1..A_{1+M}:  zeta = ln(A_1 / A_{1+M}) / (2 pi M).
double zeta_equiv(std::span<const double> peaks);

struct Peak {
    double t;
    double amplitude;
};

/// Local maxima of the tip trace with quadratic (three-point) refinement.
/// With `rectified` the maxima of |y| are returned (two per cycle); otherwise
/// only positive-swing maxima of y (one per cycle).
std::vector<Peak> envelope_peaks(const Trajectory& traj, bool rectified = false);

/// Least-squares slope of log|peak amplitude| versus log t over the peaks in
/// [t1, t2]. Requires at least 5 peaks in the window.
double decay_slope(const Trajectory& traj, double t1, double t2);

struct SpectrumPeak {
    double frequency_hz;
    double magnitude;  // relative to the largest peak (max = 1)
};

/// Peaks of the discrete Fourier magnitude of the tip trace above
/// `threshold` times the maximum, with parabolic interpolation of the bin
/// location. The trace is Blackman-windowed before the transform so that
/// leakage sidelobes stay below the 1% default threshold. Requires uniform
/// sampling.
std::vector<SpectrumPeak> spectrum_peaks(const Trajectory& traj,
                                         double threshold = 0.01);

enum class ReferenceMethod {
    kAuto,       // adaptive for n <= 80 dofs, fixed tiny-step scheme otherwise
    kAdaptive,   // embedded Dormand-Prince 5(4), abs/rel tolerance 1e-10
    kTinyStep,   // the semi-implicit scheme itself at h = 2^-23
};

/// High-accuracy reference trajectory sampled exactly at `sample_times`
/// (strictly increasing, within (0, T]; t = 0 is always included in the
/// output). The adaptive integrator clips steps to land on each requested
/// instant, so no interpolation is involved. Deterministic.
Trajectory reference_solution(const SecondOrderSystem& sys,
                              const BoucWenParams& params,
                              const Forcing& forcing, const SimState& ic,
                              double T, std::span<const double> sample_times,
                              const Eigen::RowVectorXd& output_row,
                              ReferenceMethod method = ReferenceMethod::kAuto);

struct ConvergenceReport {
    std::vector<double> h_values;  // strictly decreasing powers of 2
    std::vector<double> e_rms;
    std::vector<double> e_tau;
    double rms_slope = 0.0;  // log-log LS fit over [fit_begin, fit_end)
    double tau_slope = 0.0;
    int fit_begin = 0;
    int fit_end = 0;
};

/// Sweeps h = 2^p for p in [pow_min, pow_max] (pow_max < pow_min <= -7 so the
/// 128 sample instants land on steps exactly), computing e_rms and e_tau
/// against one shared reference run. fit_begin/fit_end select the h-indices
/// used for the slope fits (fit_end < 0 means up to the last value).
ConvergenceReport convergence_study(const SecondOrderSystem& sys,
                                    const BoucWenParams& params,
                                    const Forcing& forcing, const SimState& ic,
                                    double T, int pow_min, int pow_max,
                                    const Eigen::RowVectorXd& output_row,
                                    int n_instants = 128, double tau = 1.0,
                                    int fit_begin = 0, int fit_end = -1,
                                    ReferenceMethod method = ReferenceMethod::kAuto);

/// Unweighted least-squares slope of log(y) vs log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hysterobeam
