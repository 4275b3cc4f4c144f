#include "hysterobeam/hysteresis.hpp"

#include <cmath>
#include <stdexcept>

namespace hysterobeam {

namespace {

inline double pow_abs(double z, double n_h) {
    const double az = std::abs(z);
    if (az < 1e-300) return 0.0;
    return std::pow(az, n_h);
}

inline double sign0(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return 0.0;
}

}  // namespace

BoucWenParams::BoucWenParams(double A_bar_, double alpha_, double beta_,
                             double n_h_, double gamma_h_)
    : A_bar(A_bar_), alpha(alpha_), beta(beta_), n_h(n_h_), gamma_h(gamma_h_) {
    if (!(std::isfinite(A_bar) && std::isfinite(alpha) && std::isfinite(beta) &&
          std::isfinite(n_h) && std::isfinite(gamma_h))) {
        throw std::invalid_argument("BoucWenParams: non-finite parameter");
    }
    if (!(A_bar > 0.0)) throw std::invalid_argument("BoucWenParams: A_bar must be > 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("BoucWenParams: alpha must be > 0");
    if (!(beta > -alpha && beta < alpha)) {
        throw std::invalid_argument("BoucWenParams: beta must lie in (-alpha, alpha)");
    }
    if (!(n_h > 0.0)) throw std::invalid_argument("BoucWenParams: n_h must be > 0");
    if (!(gamma_h >= 0.0)) throw std::invalid_argument("BoucWenParams: gamma_h must be >= 0");
}

double BoucWenParams::z_saturation() const {
    return std::pow(A_bar / (alpha + beta), 1.0 / n_h);
}

double bw_rate(double z, double chi_dot, const BoucWenParams& p) {
    const double zn = pow_abs(z, p.n_h);
    return (p.A_bar - p.alpha * sign0(chi_dot * z) * zn - p.beta * zn) * chi_dot;
}

void bw_rate(const Eigen::VectorXd& z, const Eigen::VectorXd& chi_dot,
             const BoucWenParams& p, Eigen::VectorXd& z_dot) {
    if (z.size() != chi_dot.size()) {
        throw std::invalid_argument("bw_rate: z and chi_dot length mismatch");
    }
    if (!z.allFinite() || !chi_dot.allFinite()) {
        throw std::invalid_argument("bw_rate: non-finite input");
    }
    z_dot.resize(z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        z_dot[k] = bw_rate(z[k], chi_dot[k], p);
    }
}

Eigen::VectorXd bw_rate(const Eigen::VectorXd& z, const Eigen::VectorXd& chi_dot,
                        const BoucWenParams& p) {
    Eigen::VectorXd out;
    bw_rate(z, chi_dot, p, out);
    return out;
}

double chi_max(const BoucWenParams& p) {
    const double n = p.n_h;
    const double a = p.alpha;
    const double b = p.beta;
    const double num = 2.0 * std::pow(p.A_bar, 2.0 - 2.0 * n) * (1.0 + n) *
                       (1.0 + 2.0 * n) * (2.0 + 3.0 * n);
    const double den =
        (2.0 * n * n * a * a + 4.0 * n * a * a - n * b * b + 2.0 * a * a) * (2.0 + n);
    return std::pow(num / den, 1.0 / (2.0 * n));
}

double solve_abar_for_chimax(double target_chi_max, double alpha, double beta,
                             double n_h) {
    if (!(target_chi_max > 0.0)) {
        throw std::invalid_argument("solve_abar_for_chimax: target must be > 0");
    }
    if (std::abs(n_h - 1.0) < 1e-12) {
        throw std::invalid_argument(
            "solve_abar_for_chimax: chi_max is independent of A_bar at n_h = 1");
    }
    const double n = n_h;
    const double c = ((1.0 + n) * (1.0 + 2.0 * n) * (2.0 + 3.0 * n)) /
                     ((2.0 * n * n * alpha * alpha + 4.0 * n * alpha * alpha -
                       n * beta * beta + 2.0 * alpha * alpha) *
                      (2.0 + n));
    // chi_max^(2n) = 2 c A_bar^(2-2n)  =>  A_bar = (chi_max^(2n) / (2c))^(1/(2-2n))
    return std::pow(std::pow(target_chi_max, 2.0 * n) / (2.0 * c),
                    1.0 / (2.0 - 2.0 * n));
}

}  // namespace hysterobeam
