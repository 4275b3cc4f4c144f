#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hysterobeam/beam.hpp"
#include "hysterobeam/integrator.hpp"

namespace hysterobeam {

/// Snapshot histories are kept row-major so the greedy row sweep streams
/// contiguous memory.
using SnapshotMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Modal basis plus the diagonal reduced matrices  Mt = Rᵀ M R,  Kt = Rᵀ K R.
struct ModalProjection {
    Eigen::MatrixXd R;        // N×r, M-orthonormal columns
    Eigen::VectorXd m_tilde;  // diagonal of Rᵀ M R (identically 1)
    Eigen::VectorXd k_tilde;  // diagonal of Rᵀ K R (omega_i²)
    Eigen::VectorXd frequencies_hz;
};
ModalProjection project_modal(const BeamModel& model, int r);

/// Stacked, per-run Frobenius-normalized z histories: column block s holds the
/// n_t samples of run s, so Z is (n_g·n_e) × (n_t·n_s).
struct SnapshotSet {
    SnapshotMatrix Z;
    std::int64_t n_t = 0;
    std::int64_t n_s = 0;
    std::uint64_t seed = 0;
};

/// One random modal initial condition: the first r modal coordinates uniform
/// in [-1, 1], rescaled so the static tip displacement cannot exceed
/// ic_scale; velocities and hysteretic states zero.
SimState random_modal_ic(const BeamModel& model, int r, double ic_scale,
                         std::uint64_t seed);

/// Runs n_s full-model simulations over [0, T] with seeded random initial
/// conditions drawn with the random_modal_ic recipe (all draws come from one
/// sequential stream), records z at the n_t instants t_j = j·T/n_t, normalizes
/// each run block to unit Frobenius norm and stacks. Runs are distributed
/// over `workers` threads; the result is bitwise independent of scheduling.
SnapshotSet generate_snapshots(const BeamModel& model,
                               const BoucWenParams& params, int r, int n_s,
                               int n_t, double T, double h, double ic_scale,
                               std::uint64_t seed, int workers = 1);

struct GreedyResult {
    std::vector<Eigen::Index> indices;      // selection order
    std::vector<double> residual_fro;       // Frobenius norm of what remains
    bool rank_deficient = false;            // stopped early at numerical rank
};

/// Greedy row selection with modified Gram-Schmidt deflation: repeatedly pick
/// the remaining row of largest 2-norm (ties within 1e-12 relative resolve to
/// the lower original index), record its original index, normalize it, and
/// subtract its component from all remaining rows. Destroys Z in place. If
/// the residual hits numerical zero before m picks, fewer indices are
/// returned and rank_deficient is set.
GreedyResult greedy_select_inplace(SnapshotMatrix& Z, int m,
                                   double rel_tol_break = 0.0);

/// Copying convenience for small matrices (tests, bindings).
GreedyResult greedy_select(const Eigen::MatrixXd& Z, int m,
                           double rel_tol_break = 0.0);

/// Minimum-norm least-squares solve of  min_P ‖target - P Z_s‖_F  via a
/// complete orthogonal decomposition of Z_sᵀ (rank-deficient Z_s yields the
/// minimum-norm solution; normal equations are never formed).
Eigen::MatrixXd solve_p(const Eigen::MatrixXd& target,
                        const Eigen::MatrixXd& z_s);

/// Spec-shaped overload: target = Rᵀ A Z, selected rows taken from the
/// original Z.
Eigen::MatrixXd solve_p(const SnapshotMatrix& Z, const Eigen::MatrixXd& z_s,
                        const Eigen::MatrixXd& R, const Eigen::MatrixXd& A);

/// The reduced model
///   Mt ξdd + Kt ξ + P z_s = Rᵀ f0(t),   żs = BW(z_s, B_s R ξd),
/// with 2r + m first-order unknowns.
struct Rom {
    Eigen::MatrixXd R;         // N×r
    Eigen::VectorXd m_tilde;   // r
    Eigen::VectorXd k_tilde;   // r
    Eigen::MatrixXd P;         // r×m
    std::vector<std::int64_t> indices;  // retained Gauss-point ids (0-based)
    Eigen::MatrixXd B_s;       // m×N
    double A_bar, alpha, beta, n_h, gamma_h;  // Bouc-Wen constants

    BoucWenParams params() const;
    SecondOrderSystem reduced_system() const;
    int r() const { return static_cast<int>(R.cols()); }
    int m() const { return static_cast<int>(P.cols()); }
};

/// Builds a ROM from a snapshot set: greedy selection of m Gauss points, then
/// the least-squares projection matrix on the original rows.
Rom build_rom(const BeamModel& model, const BoucWenParams& params,
              const SnapshotSet& snapshots, int r, int m);

/// Integrates the reduced model with the same semi-implicit scheme. The
/// returned trajectory's output is the tip displacement reconstructed through
/// R. `forcing` acts in full space and is projected by Rᵀ (empty = none).
Trajectory simulate_rom(const Rom& rom, const Forcing& forcing,
                        const Eigen::VectorXd& xi0,
                        const Eigen::VectorXd& xidot0, double h, double T,
                        int stride, int tip_dof);

/// Snapshot container: magic "BWZ1", then little-endian u64 rows, cols, n_t,
/// n_s, seed, then IEEE-754 doubles column-major.
void save_snapshots(const SnapshotSet& snapshots,
                    const std::filesystem::path& path);
SnapshotSet load_snapshots(const std::filesystem::path& path);

/// Streams only the requested rows out of a snapshot container (the file is
/// read once, sequentially, in column blocks).
Eigen::MatrixXd read_snapshot_rows(const std::filesystem::path& path,
                                   std::span<const Eigen::Index> rows);

/// ROM container: magic "BWR1", u32 version, little-endian u64 N, r, m, then
/// doubles: R (col-major), m_tilde, k_tilde, P (col-major), B_s (col-major),
/// indices as u64, and the five Bouc-Wen constants.
void save_rom(const Rom& rom, const std::filesystem::path& path);
Rom load_rom(const std::filesystem::path& path);

}  // namespace hysterobeam
