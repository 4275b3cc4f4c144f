#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "hysterobeam/hysteresis.hpp"
#include "hysterobeam/trajectory.hpp"

namespace hysterobeam {

/// One second-order structural system with distributed hysteresis,
///
///   M qdd (+ C qd) + K q + A z = f0(t),   zdot = BW(z, chidot),  chidot = B qd.
///
/// The full beam and the reduced-order model are both expressed this way;
/// C is optional (0×0 means no viscous damping, the default everywhere).
struct SecondOrderSystem {
    Eigen::MatrixXd M;
    Eigen::MatrixXd K;
    Eigen::MatrixXd C;  // 0×0 when absent
    Eigen::MatrixXd A;  // n×nz
    Eigen::MatrixXd B;  // nz×n

    bool has_damping() const { return C.size() != 0; }
    Eigen::Index n() const { return M.rows(); }
    Eigen::Index nz() const { return B.rows(); }
};

/// Full dynamic state at one time instant.
struct SimState {
    double t = 0.0;
    Eigen::VectorXd q;
    Eigen::VectorXd v;
    Eigen::VectorXd z;
};

/// Applied forcing. `derivative` must be the analytic time derivative of
/// `value`; the first integration stage uses it directly. Empty functions
/// mean identically zero.
struct Forcing {
    std::function<Eigen::VectorXd(double)> value;
    std::function<Eigen::VectorXd(double)> derivative;
};

/// Numerical parameter of the two-stage scheme, 1 - 1/sqrt(2).
inline const double kSchemeGamma = 1.0 - 1.0 / std::sqrt(2.0);

/// Per-simulation scratch: the Cholesky factor of
///   Mtilde = M + gamma h C + (gamma h)² K
/// is cached and reused while h stays fixed, so a step costs two triangular
/// solves rather than a factorization.
class StepWorkspace {
public:
    StepWorkspace() = default;

    /// Factorizes Mtilde for the given step size; no-op if already prepared.
    void prepare(const SecondOrderSystem& sys, double h);

    bool ready_for(double h) const { return h_ == h; }
    double h() const { return h_; }

    Eigen::LLT<Eigen::MatrixXd> mtilde_llt;

    // stage scratch, sized by prepare()
    Eigen::VectorXd chidot0, chidot1, zdot0, z_half, z1;
    Eigen::VectorXd F0, Fdot0, r0, rhs, e_tilde, d_tilde, e, d, q1, v1, Kv;

private:
    double h_ = -1.0;
};

/// Explicit predictor-corrector update of the hysteretic variables over one
/// step, with linear-interpolation splitting at curvature-rate zero
/// crossings. Entry k is "flipped" iff chidot0[k]·chidot1[k] < 0 strictly;
/// zero products take the plain Heun step, which also removes the degenerate
/// denominator in the crossing time
///   h0 = -h chidot0 / (chidot1 - chidot0).
void split_step(const Eigen::VectorXd& z0, const Eigen::VectorXd& chidot0,
                const Eigen::VectorXd& chidot1, double h,
                const BoucWenParams& params, Eigen::VectorXd& z1);

Eigen::VectorXd split_step(const Eigen::VectorXd& z0,
                           const Eigen::VectorXd& chidot0,
                           const Eigen::VectorXd& chidot1, double h,
                           const BoucWenParams& params);

/// Advances the state by one step of size h: two-stage implicit update of
/// (q, v) with the hysteretic force extrapolated to mid-step, then the
/// explicit split step for z. Throws std::runtime_error naming the stage if
/// a non-finite intermediate appears.
void step(SimState& state, double h, const SecondOrderSystem& sys,
          const BoucWenParams& params, const Forcing& forcing,
          StepWorkspace& ws);

struct SimulateOptions {
    double h = 1e-4;
    double T = 1.0;
    int stride = 1;          // record every `stride` steps (plus t = 0)
    bool record_q = false;
    bool record_v = false;
    bool record_z = false;
};

/// Runs round(T/h) steps from the initial state, recording the scalar output
/// y = output_row · q every `stride` steps including t = 0 and t = T.
/// Deterministic given inputs. Step errors propagate with the failing time.
Trajectory simulate(const SecondOrderSystem& sys, const BoucWenParams& params,
                    const Forcing& forcing, const SimState& ic,
                    const SimulateOptions& opt,
                    const Eigen::RowVectorXd& output_row);

}  // namespace hysterobeam
