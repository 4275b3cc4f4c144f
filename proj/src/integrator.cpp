#include "hysterobeam/integrator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hysterobeam {

namespace {

inline double sign0(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return 0.0;
}

inline double bw_rate_raw(double z, double chi_dot, const BoucWenParams& p) {
    const double az = std::abs(z);
    const double zn = az < 1e-300 ? 0.0 : std::pow(az, p.n_h);
    return (p.A_bar - p.alpha * sign0(chi_dot * z) * zn - p.beta * zn) * chi_dot;
}

[[noreturn]] void fail_stage(const char* stage, double t) {
    throw std::runtime_error(std::string("step: non-finite ") + stage +
                             " at t = " + std::to_string(t));
}

}  // namespace

void StepWorkspace::prepare(const SecondOrderSystem& sys, double h) {
    if (h_ == h) return;
    if (!(h > 0.0)) throw std::invalid_argument("StepWorkspace: h must be > 0");
    const double gh = kSchemeGamma * h;
    Eigen::MatrixXd mtilde = sys.M + (gh * gh) * sys.K;
    if (sys.has_damping()) mtilde += gh * sys.C;
    mtilde_llt.compute(mtilde);
    if (mtilde_llt.info() != Eigen::Success) {
        throw std::runtime_error("StepWorkspace: Mtilde factorization failed");
    }
    const Eigen::Index n = sys.n();
    const Eigen::Index nz = sys.nz();
    chidot0.resize(nz); chidot1.resize(nz); zdot0.resize(nz);
    z_half.resize(nz); z1.resize(nz);
    F0.resize(n); Fdot0.resize(n); r0.resize(n); rhs.resize(n);
    e_tilde.resize(n); d_tilde.resize(n); e.resize(n); d.resize(n);
    q1.resize(n); v1.resize(n); Kv.resize(n);
    h_ = h;
}

void split_step(const Eigen::VectorXd& z0, const Eigen::VectorXd& chidot0,
                const Eigen::VectorXd& chidot1, double h,
                const BoucWenParams& p, Eigen::VectorXd& z1) {
    if (z0.size() != chidot0.size() || z0.size() != chidot1.size()) {
        throw std::invalid_argument("split_step: length mismatch");
    }
    z1.resize(z0.size());
    for (Eigen::Index k = 0; k < z0.size(); ++k) {
        const double c0 = chidot0[k];
        const double c1 = chidot1[k];
        if (c0 * c1 < 0.0) {
            // Sign flip: advance to the interpolated crossing, then finish.
            const double h0 = -h * c0 / (c1 - c0);
            const double s1 = bw_rate_raw(z0[k], c0, p);
            const double z_mid = z0[k] + h0 * s1 / 2.0;
            const double s2 = bw_rate_raw(z_mid, c1, p);
            z1[k] = z_mid + (h - h0) * s2 / 2.0;
        } else {
            const double s1 = bw_rate_raw(z0[k], c0, p);
            const double z_pred = z0[k] + h * s1;
            const double s2 = bw_rate_raw(z_pred, c1, p);
            z1[k] = z0[k] + h * (s1 + s2) / 2.0;
        }
    }
}

Eigen::VectorXd split_step(const Eigen::VectorXd& z0,
                           const Eigen::VectorXd& chidot0,
                           const Eigen::VectorXd& chidot1, double h,
                           const BoucWenParams& p) {
    Eigen::VectorXd z1;
    split_step(z0, chidot0, chidot1, h, p, z1);
    return z1;
}

void step(SimState& s, double h, const SecondOrderSystem& sys,
          const BoucWenParams& p, const Forcing& f, StepWorkspace& ws) {
    ws.prepare(sys, h);
    const double g = kSchemeGamma;
    const double t0 = s.t;

    // Stage data at t0.
    ws.chidot0.noalias() = sys.B * s.v;
    for (Eigen::Index k = 0; k < s.z.size(); ++k) {
        ws.zdot0[k] = bw_rate_raw(s.z[k], ws.chidot0[k], p);
    }
    ws.F0.noalias() = -(sys.A * s.z);
    if (f.value) ws.F0 += f.value(t0);
    ws.Fdot0.noalias() = -(sys.A * ws.zdot0);
    if (f.derivative) ws.Fdot0 += f.derivative(t0);
    ws.r0.noalias() = sys.K * s.q;
    if (sys.has_damping()) ws.r0.noalias() += sys.C * s.v;

    // First stage.
    ws.Kv.noalias() = sys.K * s.v;
    ws.rhs = ws.F0 - ws.r0 + (h * g) * (ws.Fdot0 - ws.Kv);
    ws.mtilde_llt.solveInPlace(ws.rhs);
    ws.e_tilde = h * ws.rhs;
    ws.d_tilde = h * (s.v + g * ws.e_tilde);
    if (!ws.e_tilde.allFinite()) fail_stage("first-stage increment", t0);

    // Second stage with the hysteretic force extrapolated to mid-step.
    ws.z_half = s.z + (h / 2.0) * ws.zdot0;
    ws.rhs.noalias() = -(sys.A * ws.z_half);
    if (f.value) ws.rhs += f.value(t0 + h / 2.0);
    ws.rhs.noalias() -= sys.K * (s.q + 0.5 * ws.d_tilde).eval();
    if (sys.has_damping()) {
        ws.rhs.noalias() -= sys.C * (s.v + 0.5 * ws.e_tilde).eval();
        ws.rhs.noalias() += g * (sys.C * ws.e_tilde);
    }
    ws.Kv.noalias() = sys.K * ws.e_tilde;
    ws.rhs += (h * g) * (2.0 * g - 0.5) * ws.Kv;
    ws.mtilde_llt.solveInPlace(ws.rhs);
    ws.e = h * ws.rhs;
    ws.d = h * (s.v + (0.5 - g) * ws.e_tilde + g * ws.e);
    if (!ws.e.allFinite() || !ws.d.allFinite()) {
        fail_stage("second-stage increment", t0);
    }

    ws.q1 = s.q + ws.d;
    ws.v1 = s.v + ws.e;
    ws.chidot1.noalias() = sys.B * ws.v1;

    split_step(s.z, ws.chidot0, ws.chidot1, h, p, ws.z1);
    if (!ws.z1.allFinite()) fail_stage("hysteretic update", t0);

    s.q.swap(ws.q1);
    s.v.swap(ws.v1);
    s.z.swap(ws.z1);
    s.t = t0 + h;
}

Trajectory simulate(const SecondOrderSystem& sys, const BoucWenParams& p,
                    const Forcing& f, const SimState& ic,
                    const SimulateOptions& opt,
                    const Eigen::RowVectorXd& output_row) {
    if (!(opt.T > 0.0)) throw std::invalid_argument("simulate: T must be > 0");
    if (opt.stride < 1) throw std::invalid_argument("simulate: stride must be >= 1");
    if (ic.q.size() != sys.n() || ic.v.size() != sys.n() || ic.z.size() != sys.nz()) {
        throw std::invalid_argument("simulate: initial state dimensions mismatch");
    }
    const auto n_steps = static_cast<long long>(std::llround(opt.T / opt.h));
    if (n_steps < 1 || std::abs(n_steps * opt.h - opt.T) > 1e-9 * opt.T) {
        throw std::invalid_argument("simulate: T must be an integer number of steps");
    }

    SimState s = ic;
    s.t = 0.0;
    StepWorkspace ws;
    ws.prepare(sys, opt.h);

    const auto n_records =
        static_cast<std::size_t>(n_steps / opt.stride +
                                 (n_steps % opt.stride ? 2 : 1));
    Trajectory traj;
    traj.h = opt.h;
    traj.stride = opt.stride;
    traj.times.reserve(n_records);
    traj.tip.reserve(n_records);
    if (opt.record_q) traj.q.resize(sys.n(), static_cast<Eigen::Index>(n_records));
    if (opt.record_v) traj.v.resize(sys.n(), static_cast<Eigen::Index>(n_records));
    if (opt.record_z) traj.z.resize(sys.nz(), static_cast<Eigen::Index>(n_records));

    auto record = [&](const SimState& st) {
        const auto col = static_cast<Eigen::Index>(traj.times.size());
        traj.times.push_back(st.t);
        traj.tip.push_back(output_row.dot(st.q));
        if (opt.record_q) traj.q.col(col) = st.q;
        if (opt.record_v) traj.v.col(col) = st.v;
        if (opt.record_z) traj.z.col(col) = st.z;
    };

    record(s);
    for (long long k = 1; k <= n_steps; ++k) {
        try {
            step(s, opt.h, sys, p, f, ws);
        } catch (const std::runtime_error& err) {
            throw std::runtime_error(std::string(err.what()) + " (step " +
                                     std::to_string(k) + ")");
        }
        s.t = static_cast<double>(k) * opt.h;  // avoid accumulated drift
        if (k % opt.stride == 0 || k == n_steps) record(s);
    }
    return traj;
}

}  // namespace hysterobeam
