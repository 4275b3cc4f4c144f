#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "hysterobeam/analysis.hpp"
#include "hysterobeam/beam.hpp"
#include "hysterobeam/integrator.hpp"
#include "oracle_helpers.hpp"

using namespace hysterobeam;

namespace {

SecondOrderSystem scalar_system(double mass, double stiffness) {
    SecondOrderSystem sys;
    sys.M = Eigen::MatrixXd::Constant(1, 1, mass);
    sys.K = Eigen::MatrixXd::Constant(1, 1, stiffness);
    sys.A = Eigen::MatrixXd::Zero(1, 1);
    sys.B = Eigen::MatrixXd::Zero(1, 1);
    return sys;
}

SecondOrderSystem beam_system(const BeamModel& model) {
    return SecondOrderSystem{model.M, model.K, {}, model.A, model.B};
}

Eigen::RowVectorXd tip_row(const BeamModel& model) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(model.M.rows());
    row[model.tip_dof()] = 1.0;
    return row;
}

const BoucWenParams kPaperParams(0.065, 0.8, 0.5, 0.5, 3000.0);

}  // namespace

TEST_CASE("split_step: unchanged branch evaluates the Heun formula") {
    const BoucWenParams p(0.065, 0.8, 0.5, 0.5, 0.0);
    const double c = 1.7;
    const double h = 0.01;
    Eigen::VectorXd z0 = Eigen::VectorXd::Zero(1);
    Eigen::VectorXd cd0 = Eigen::VectorXd::Constant(1, c);
    const Eigen::VectorXd z1 = split_step(z0, cd0, cd0, h, p);

    const double s1 = p.A_bar * c;              // |0|^n_h = 0
    const double z_pred = h * s1;
    const double s2 = bw_rate(z_pred, c, p);
    CHECK(z1[0] == doctest::Approx(h * (s1 + s2) / 2.0).epsilon(1e-15));
}

TEST_CASE("split_step: symmetric flip crosses at h/2") {
    const BoucWenParams p(0.065, 0.8, 0.5, 0.5, 0.0);
    const double h = 0.02;
    const double c = 0.9;
    Eigen::VectorXd z0 = Eigen::VectorXd::Constant(1, 0.001);
    Eigen::VectorXd cd0 = Eigen::VectorXd::Constant(1, c);
    Eigen::VectorXd cd1 = Eigen::VectorXd::Constant(1, -c);
    const Eigen::VectorXd z1 = split_step(z0, cd0, cd1, h, p);

    const double h0 = h / 2.0;  // -h c / (-c - c)
    const double s1 = bw_rate(z0[0], c, p);
    const double z_mid = z0[0] + h0 * s1 / 2.0;
    const double s2 = bw_rate(z_mid, -c, p);
    CHECK(z1[0] == doctest::Approx(z_mid + (h - h0) * s2 / 2.0).epsilon(1e-15));
}

TEST_CASE("split_step: zero products take the unchanged branch") {
    const BoucWenParams p(0.065, 0.8, 0.5, 0.5, 0.0);
    Eigen::VectorXd z0 = Eigen::VectorXd::Constant(1, 0.001);
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
    Eigen::VectorXd cd1 = Eigen::VectorXd::Constant(1, -2.0);
    // chidot0 = 0: no crossing-time division; Heun with s1 = 0 drive.
    const Eigen::VectorXd z1 = split_step(z0, zero, cd1, 0.01, p);
    const double s2 = bw_rate(z0[0], -2.0, p);
    CHECK(z1[0] == doctest::Approx(z0[0] + 0.01 * s2 / 2.0).epsilon(1e-15));
}

TEST_CASE("split_step with a sign flip is second order against a fine oracle") {
    // chi(t) = sin(2 pi t): chidot flips sign at t = 0.25. One step of the
    // split update across the flip, compared with a 1e4-substep explicit
    // reference over the same interval.
    const BoucWenParams p(0.5, 0.8, 0.5, 0.5, 0.0);
    auto chi = [](double t) { return std::sin(2.0 * M_PI * t); };

    std::vector<double> hs, errs;
    for (double h : {0.1, 0.05, 0.025, 0.0125}) {
        // Center the step on the chidot sign flip at t = 0.25.
        const double t0 = 0.25 - h / 2.0;
        const double z_start = oracle::fine_step_bw(p, chi, t0, 400000);
        const double chidot0 = 2.0 * M_PI * std::cos(2.0 * M_PI * t0);
        const double chidot1 = 2.0 * M_PI * std::cos(2.0 * M_PI * (t0 + h));
        REQUIRE(chidot0 * chidot1 < 0.0);
        Eigen::VectorXd z1 = split_step(
            Eigen::VectorXd::Constant(1, z_start),
            Eigen::VectorXd::Constant(1, chidot0),
            Eigen::VectorXd::Constant(1, chidot1), h, p);
        const double z_ref = oracle::fine_step_bw(
            p, [&](double t) { return chi(t0 + t); }, h, 20000, z_start);
        hs.push_back(h);
        errs.push_back(std::abs(z1[0] - z_ref) + 1e-18);
    }
    // O(h^2): each halving divides the error by about 4.
    const double slope = hysterobeam::loglog_slope(hs, errs);
    CHECK(slope > 1.7);
}

TEST_CASE("zero state with zero forcing stays exactly zero") {
    const BeamModel model = assemble(BeamGeometry(1.0, 2666.7, 3.14, 4), 3000.0);
    SimState ic;
    ic.q = Eigen::VectorXd::Zero(model.M.rows());
    ic.v = Eigen::VectorXd::Zero(model.M.rows());
    ic.z = Eigen::VectorXd::Zero(model.B.rows());
    SimulateOptions opt;
    opt.h = 1e-3;
    opt.T = 0.1;
    const Trajectory traj =
        simulate(beam_system(model), kPaperParams, {}, ic, opt, tip_row(model));
    for (double y : traj.tip) CHECK(y == 0.0);
}

TEST_CASE("linear scalar oscillator converges at second order") {
    // gamma_h = 0 single dof: q(t) = cos(omega t).
    const double omega = 2.0 * M_PI * 5.0;
    const SecondOrderSystem sys = scalar_system(1.0, omega * omega);
    const BoucWenParams p(1.0, 0.8, 0.5, 1.0, 0.0);
    SimState ic;
    ic.q = Eigen::VectorXd::Constant(1, 1.0);
    ic.v = Eigen::VectorXd::Zero(1);
    ic.z = Eigen::VectorXd::Zero(1);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Constant(1, 1.0);

    std::vector<double> hs, errs;
    for (int pexp = 10; pexp <= 14; ++pexp) {
        SimulateOptions opt;
        opt.h = std::ldexp(1.0, -pexp);
        opt.T = 0.25;
        opt.stride = 1;
        const Trajectory traj = simulate(sys, p, {}, ic, opt, row);
        double max_err = 0.0;
        for (std::size_t k = 0; k < traj.size(); ++k) {
            max_err = std::max(
                max_err, std::abs(traj.tip[k] - std::cos(omega * traj.times[k])));
        }
        hs.push_back(opt.h);
        errs.push_back(max_err);
    }
    const double slope = loglog_slope(hs, errs);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("viscous damping hook: damped oscillator converges at second order") {
    // q'' + 2 zeta w q' + w^2 q = 0 against the closed-form solution.
    const double omega = 2.0 * M_PI * 4.0;
    const double zeta = 0.1;
    SecondOrderSystem sys = scalar_system(1.0, omega * omega);
    sys.C = Eigen::MatrixXd::Constant(1, 1, 2.0 * zeta * omega);
    const BoucWenParams p(1.0, 0.8, 0.5, 1.0, 0.0);
    SimState ic;
    ic.q = Eigen::VectorXd::Constant(1, 1.0);
    ic.v = Eigen::VectorXd::Zero(1);
    ic.z = Eigen::VectorXd::Zero(1);
    const Eigen::RowVectorXd row = Eigen::RowVectorXd::Constant(1, 1.0);

    const double wd = omega * std::sqrt(1.0 - zeta * zeta);
    auto exact = [&](double t) {
        return std::exp(-zeta * omega * t) *
               (std::cos(wd * t) + zeta * omega / wd * std::sin(wd * t));
    };
    std::vector<double> hs, errs;
    for (int pexp = 10; pexp <= 14; ++pexp) {
        SimulateOptions opt;
        opt.h = std::ldexp(1.0, -pexp);
        opt.T = 0.25;
        const Trajectory traj = simulate(sys, p, {}, ic, opt, row);
        double max_err = 0.0;
        for (std::size_t k = 0; k < traj.size(); ++k) {
            max_err = std::max(max_err,
                               std::abs(traj.tip[k] - exact(traj.times[k])));
        }
        hs.push_back(opt.h);
        errs.push_back(max_err);
    }
    CHECK(loglog_slope(hs, errs) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("three-mode start at h = 1e-5 stays close to the reference" *
          doctest::timeout(600)) {
    const BeamModel model = assemble(BeamGeometry(1.0, 2666.7, 3.14, 10), 3000.0);
    const ModalResult modes = modal_analysis(model, 3);
    SimState ic;
    ic.q = Eigen::VectorXd::Zero(model.M.rows());
    for (int j = 0; j < 3; ++j) {
        ic.q += modes.R.col(j) * (0.02 / modes.R(model.tip_dof(), j));
    }
    ic.v = Eigen::VectorXd::Zero(model.M.rows());
    ic.z = Eigen::VectorXd::Zero(model.B.rows());

    const double T = 0.25;
    std::vector<double> instants;
    for (int k = 1; k <= 25; ++k) instants.push_back(k * 0.01);
    const Trajectory ref = reference_solution(beam_system(model), kPaperParams,
                                              {}, ic, T, instants,
                                              tip_row(model),
                                              ReferenceMethod::kAdaptive);
    SimulateOptions opt;
    opt.h = 1e-5;
    opt.T = T;
    opt.stride = 1000;
    const Trajectory traj = simulate(beam_system(model), kPaperParams, {}, ic,
                                     opt, tip_row(model));
    double num = 0.0, den = 0.0;
    for (double t : instants) {
        const double diff = traj.value_at(t) - ref.value_at(t);
        num += diff * diff;
        den += ref.value_at(t) * ref.value_at(t);
    }
    CHECK(std::sqrt(num / den) < 1e-3);
}

TEST_CASE("gamma_h = 0 reduces to per-mode scalar integration") {
    // 2-dof linear test: stepping the coupled system must equal stepping each
    // modal oscillator separately, to roundoff.
    Eigen::MatrixXd M(2, 2), K(2, 2);
    M << 2.0, 0.3, 0.3, 1.5;
    K << 500.0, -120.0, -120.0, 300.0;
    SecondOrderSystem sys;
    sys.M = M;
    sys.K = K;
    sys.A = Eigen::MatrixXd::Zero(2, 1);
    sys.B = Eigen::MatrixXd::Zero(1, 2);
    const BoucWenParams p(1.0, 0.8, 0.5, 1.0, 0.0);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    const Eigen::MatrixXd V = es.eigenvectors();
    const Eigen::VectorXd w2 = es.eigenvalues();

    SimState ic;
    ic.q = Eigen::VectorXd::Zero(2);
    ic.q << 0.01, -0.02;
    ic.v = Eigen::VectorXd::Zero(2);
    ic.v << 0.3, 0.1;
    ic.z = Eigen::VectorXd::Zero(1);

    const double h = 1e-3;
    const int n_steps = 200;
    SimState coupled = ic;
    coupled.t = 0.0;
    StepWorkspace ws;
    for (int k = 0; k < n_steps; ++k) step(coupled, h, sys, p, {}, ws);

    Eigen::VectorXd xi = V.transpose() * M * ic.q;
    Eigen::VectorXd xidot = V.transpose() * M * ic.v;
    for (int mode = 0; mode < 2; ++mode) {
        const SecondOrderSystem scalar = scalar_system(1.0, w2[mode]);
        SimState s;
        s.q = Eigen::VectorXd::Constant(1, xi[mode]);
        s.v = Eigen::VectorXd::Constant(1, xidot[mode]);
        s.z = Eigen::VectorXd::Zero(1);
        StepWorkspace ws_mode;
        for (int k = 0; k < n_steps; ++k) step(s, h, scalar, p, {}, ws_mode);
        xi[mode] = s.q[0];
        xidot[mode] = s.v[0];
    }
    const Eigen::VectorXd q_modal = V * xi;
    const Eigen::VectorXd v_modal = V * xidot;
    CHECK((coupled.q - q_modal).norm() < 1e-12 * q_modal.norm());
    CHECK((coupled.v - v_modal).norm() < 1e-12 * v_modal.norm());
}

TEST_CASE("forced linear run matches the adaptive reference") {
    // Exercises the forcing-derivative term in the first stage.
    const BeamModel model = assemble(BeamGeometry(1.0, 2666.7, 3.14, 6), 0.0);
    const auto n = model.M.rows();
    const double omega = 2.0 * M_PI * 12.0;
    const int tip = model.tip_dof();
    Forcing forcing;
    forcing.value = [n, tip, omega](double t) {
        Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
        f[tip] = 50.0 * std::sin(omega * t);
        return f;
    };
    forcing.derivative = [n, tip, omega](double t) {
        Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
        f[tip] = 50.0 * omega * std::cos(omega * t);
        return f;
    };

    // The construction above must satisfy the analytic-derivative contract.
    const double fd = (forcing.value(0.1 + 1e-6)[tip] -
                       forcing.value(0.1 - 1e-6)[tip]) / 2e-6;
    CHECK(forcing.derivative(0.1)[tip] == doctest::Approx(fd).epsilon(1e-6));

    SimState ic;
    ic.q = Eigen::VectorXd::Zero(n);
    ic.v = Eigen::VectorXd::Zero(n);
    ic.z = Eigen::VectorXd::Zero(model.B.rows());
    const BoucWenParams p(1.0, 0.8, 0.5, 1.0, 0.0);

    std::vector<double> instants;
    for (int k = 1; k <= 16; ++k) instants.push_back(k * 0.25 / 16);
    const Trajectory ref = hysterobeam::reference_solution(
        beam_system(model), p, forcing, ic, 0.25, instants, tip_row(model),
        ReferenceMethod::kAdaptive);
    double scale = 0.0;
    for (double t : instants) scale = std::max(scale, std::abs(ref.value_at(t)));

    auto max_error = [&](int pexp) {
        SimulateOptions opt;
        opt.h = std::ldexp(1.0, -pexp);
        opt.T = 0.25;
        opt.stride = 1 << (pexp - 6);  // record on the instants grid
        const Trajectory traj =
            simulate(beam_system(model), p, forcing, ic, opt, tip_row(model));
        double err = 0.0;
        for (double t : instants) {
            err = std::max(err, std::abs(traj.value_at(t) - ref.value_at(t)));
        }
        return err;
    };
    const double coarse = max_error(12);
    const double fine = max_error(14);
    CHECK(fine < 1e-4 * scale);
    CHECK(coarse / fine > 8.0);  // second order: ideally 16 per two halvings
}

TEST_CASE("simulate validates inputs and reports failing steps") {
    const BeamModel model = assemble(BeamGeometry(1.0, 2666.7, 3.14, 3), 0.0);
    SimState ic;
    ic.q = Eigen::VectorXd::Zero(model.M.rows());
    ic.v = Eigen::VectorXd::Zero(model.M.rows());
    ic.z = Eigen::VectorXd::Zero(model.B.rows());
    SimulateOptions opt;
    opt.h = 1e-3;
    opt.T = -1.0;
    CHECK_THROWS_AS(
        simulate(beam_system(model), kPaperParams, {}, ic, opt, tip_row(model)),
        std::invalid_argument);
    opt.T = 0.1;
    opt.stride = 0;
    CHECK_THROWS_AS(
        simulate(beam_system(model), kPaperParams, {}, ic, opt, tip_row(model)),
        std::invalid_argument);
    opt.stride = 1;
    ic.q.resize(1);
    CHECK_THROWS_AS(
        simulate(beam_system(model), kPaperParams, {}, ic, opt, tip_row(model)),
        std::invalid_argument);
}

TEST_CASE("deterministic: identical runs produce identical bits") {
    const BeamModel model = assemble(BeamGeometry(1.0, 2666.7, 3.14, 8), 3000.0);
    const ModalResult modes = modal_analysis(model, 1);
    SimState ic;
    ic.q = modes.R.col(0) * (0.06 / modes.R(model.tip_dof(), 0));
    ic.v = Eigen::VectorXd::Zero(model.M.rows());
    ic.z = Eigen::VectorXd::Zero(model.B.rows());
    SimulateOptions opt;
    opt.h = 1e-4;
    opt.T = 0.05;
    const Trajectory a =
        simulate(beam_system(model), kPaperParams, {}, ic, opt, tip_row(model));
    const Trajectory b =
        simulate(beam_system(model), kPaperParams, {}, ic, opt, tip_row(model));
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.tip[k] == b.tip[k]);
    }
}

TEST_CASE("workspace is refreshed when h changes") {
    const SecondOrderSystem sys = scalar_system(1.0, 100.0);
    StepWorkspace ws;
    ws.prepare(sys, 1e-3);
    CHECK(ws.ready_for(1e-3));
    CHECK(!ws.ready_for(1e-4));
    ws.prepare(sys, 1e-4);
    CHECK(ws.ready_for(1e-4));
    CHECK_THROWS_AS(ws.prepare(sys, 0.0), std::invalid_argument);
}

TEST_CASE("unforced energy decays over period-scale windows" *
          doctest::timeout(300)) {
    // (1/2) v'Mv + (1/2) q'Kq sampled along an unforced run. The hysteretic
    // moment briefly returns energy after each curvature-rate reversal, so
    // monotonicity is asserted over windows of one first-mode period; over
    // 10-step windows the rebound must stay below 2.5% of the stored energy.
    const BeamModel model = assemble(BeamGeometry(1.0, 2666.7, 3.14, 10), 3000.0);
    const ModalResult modes = modal_analysis(model, 1);
    SimState s;
    s.q = modes.R.col(0) * (0.06 / modes.R(model.tip_dof(), 0));
    s.v = Eigen::VectorXd::Zero(model.M.rows());
    s.z = Eigen::VectorXd::Zero(model.B.rows());

    const SecondOrderSystem sys = beam_system(model);
    const double h = 1e-4;
    const int n_steps = 5000;  // 0.5 s, about 8 cycles
    StepWorkspace ws;
    std::vector<double> energy;
    energy.reserve(n_steps + 1);
    auto record = [&] {
        energy.push_back(0.5 * s.v.dot(model.M * s.v) +
                         0.5 * s.q.dot(model.K * s.q));
    };
    record();
    for (int k = 0; k < n_steps; ++k) {
        step(s, h, sys, kPaperParams, {}, ws);
        record();
    }

    const int period_steps = static_cast<int>(
        std::ceil(1.0 / (16.3 * h)));  // first-mode period / h
    for (std::size_t k = 0; k + period_steps < energy.size(); ++k) {
        CHECK(energy[k + period_steps] <= energy[k] * (1.0 + 1e-9));
    }
    for (std::size_t k = 0; k + 10 < energy.size(); ++k) {
        CHECK(energy[k + 10] <= energy[k] * 1.025);
    }
}
