#pragma once

#include <Eigen/Dense>

namespace hysterobeam {

/// Bouc-Wen constitutive constants plus the dissipation strength gamma_h.
///
/// The rate law for one hysteretic variable z driven by a curvature rate
/// chi_dot is
///
///   zdot = (A_bar - alpha * sign(chi_dot * z) * |z|^n_h - beta * |z|^n_h) * chi_dot
///
/// with A_bar > 0, alpha > 0, beta in (-alpha, alpha), n_h > 0. All four are
/// dimensionless; gamma_h carries units of N·m and scales the dissipative
/// bending moment gamma_h * z.
struct BoucWenParams {
    double A_bar;
    double alpha;
    double beta;
    double n_h;
    double gamma_h;

    /// Validates all constraints; throws std::invalid_argument on violation.
    BoucWenParams(double A_bar, double alpha, double beta, double n_h,
                  double gamma_h);

    /// Fixed point of the loading branch: zdot = 0 at |z| = (A_bar/(alpha+beta))^(1/n_h).
    /// Trajectories driven by any bounded chi_dot stay within this bound once
    /// they reach it.
    double z_saturation() const;
};

/// Scalar Bouc-Wen rate. sign(0) is taken as 0; |z|^n_h is flushed to zero
/// for |z| < 1e-300 so that fractional n_h never sees log of a denormal.
double bw_rate(double z, double chi_dot, const BoucWenParams& p);

/// Elementwise rate for a vector of hysteretic variables. z and chi_dot must
/// have equal length and be finite; violations throw.
void bw_rate(const Eigen::VectorXd& z, const Eigen::VectorXd& chi_dot,
             const BoucWenParams& p, Eigen::VectorXd& z_dot);

Eigen::VectorXd bw_rate(const Eigen::VectorXd& z, const Eigen::VectorXd& chi_dot,
                        const BoucWenParams& p);

/// Amplitude bound below which the Bouc-Wen small-amplitude power law holds:
///
///   chi_max = ( 2 A_bar^(2-2n) (1+n)(1+2n)(2+3n)
///             / ((2n²α² + 4nα² - nβ² + 2α²)(2+n)) )^(1/(2n))
///
/// with n = n_h. gamma_h plays no role here.
double chi_max(const BoucWenParams& p);

/// Closed-form inversion of chi_max: returns the A_bar for which the bound
/// equals target_chi_max. Undefined at n_h = 1, where chi_max does not depend
/// on A_bar (throws std::invalid_argument).
double solve_abar_for_chimax(double target_chi_max, double alpha, double beta,
                             double n_h);

}  // namespace hysterobeam
