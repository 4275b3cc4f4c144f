#include "hysterobeam/rom.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "hysterobeam/prng.hpp"

namespace hysterobeam {

ModalProjection project_modal(const BeamModel& model, int r) {
    ModalResult modes = modal_analysis(model, r);
    ModalProjection out;
    out.R = std::move(modes.R);
    out.frequencies_hz = std::move(modes.frequencies_hz);
    out.m_tilde = (out.R.transpose() * model.M * out.R).diagonal();
    out.k_tilde = (out.R.transpose() * model.K * out.R).diagonal();
    return out;
}

namespace {

// gamma_h is baked into the model's A matrix and carried in BoucWenParams;
// a silent mismatch would integrate a different structure than intended.
void require_matching_gamma(const BeamModel& model, const BoucWenParams& p,
                            const char* where) {
    const double scale = std::max(1.0, std::abs(model.gamma_h));
    if (std::abs(model.gamma_h - p.gamma_h) > 1e-12 * scale) {
        throw std::invalid_argument(
            std::string(where) + ": model assembled with gamma_h = " +
            std::to_string(model.gamma_h) + " but params carry gamma_h = " +
            std::to_string(p.gamma_h));
    }
}

}  // namespace

SimState random_modal_ic(const BeamModel& model, int r, double ic_scale,
                         std::uint64_t seed) {
    const ModalResult modes = modal_analysis(model, r);
    const int tip = model.tip_dof();
    double tip_reach = 0.0;
    for (int j = 0; j < r; ++j) tip_reach += std::abs(modes.R(tip, j));
    SplitMix64 rng(seed);
    Eigen::VectorXd xi(r);
    for (int j = 0; j < r; ++j) xi[j] = ic_scale / tip_reach * rng.uniform_sym();
    SimState state;
    state.q = modes.R * xi;
    state.v = Eigen::VectorXd::Zero(model.M.rows());
    state.z = Eigen::VectorXd::Zero(model.B.rows());
    return state;
}

SnapshotSet generate_snapshots(const BeamModel& model,
                               const BoucWenParams& params, int r, int n_s,
                               int n_t, double T, double h, double ic_scale,
                               std::uint64_t seed, int workers) {
    if (n_s < 1 || n_t < 1) {
        throw std::invalid_argument("generate_snapshots: n_s, n_t must be >= 1");
    }
    require_matching_gamma(model, params, "generate_snapshots");
    const auto stride = static_cast<long long>(std::llround(T / (n_t * h)));
    if (stride < 1 || std::abs(stride * h * n_t - T) > 1e-9 * T) {
        throw std::invalid_argument(
            "generate_snapshots: T/(n_t h) must be a positive integer");
    }
    const ModalProjection basis = project_modal(model, r);
    const int tip = model.tip_dof();

    // Uniform modal coordinates in [-1, 1], rescaled so that even the worst
    // sign combination keeps the static tip displacement within ic_scale.
    double tip_reach = 0.0;
    for (int j = 0; j < r; ++j) tip_reach += std::abs(basis.R(tip, j));
    const double coeff_scale = ic_scale / tip_reach;

    // All initial conditions come from one sequential stream so the result
    // does not depend on how runs are scheduled over threads.
    Eigen::MatrixXd coeffs(r, n_s);
    SplitMix64 rng(seed);
    for (int s = 0; s < n_s; ++s) {
        for (int j = 0; j < r; ++j) coeffs(j, s) = coeff_scale * rng.uniform_sym();
    }

    const Eigen::Index nz = model.B.rows();
    SnapshotSet set;
    set.n_t = n_t;
    set.n_s = n_s;
    set.seed = seed;
    set.Z.resize(nz, static_cast<Eigen::Index>(n_t) * n_s);

    const SecondOrderSystem sys{model.M, model.K, {}, model.A, model.B};
    Eigen::RowVectorXd out_row = Eigen::RowVectorXd::Zero(model.M.rows());
    out_row[tip] = 1.0;

    std::atomic<int> next_run{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;

    auto worker = [&]() {
        SimulateOptions opt;
        opt.h = h;
        opt.T = T;
        opt.stride = static_cast<int>(stride);
        opt.record_z = true;
        for (;;) {
            const int s = next_run.fetch_add(1);
            if (s >= n_s || failed.load()) break;
            try {
                SimState ic;
                ic.q = basis.R * coeffs.col(s);
                ic.v = Eigen::VectorXd::Zero(model.M.rows());
                ic.z = Eigen::VectorXd::Zero(nz);
                Trajectory traj = simulate(sys, params, {}, ic, opt, out_row);
                // Recorded columns: t = 0 plus the n_t requested instants.
                if (traj.z.cols() != n_t + 1) {
                    throw std::runtime_error("unexpected snapshot sample count");
                }
                Eigen::MatrixXd block = traj.z.rightCols(n_t);
                const double fro = block.norm();
                if (fro > 0.0) block /= fro;
                set.Z.middleCols(static_cast<Eigen::Index>(s) * n_t, n_t) = block;
            } catch (const std::exception& err) {
                std::scoped_lock lock(error_mutex);
                failed.store(true);
                error_message = "generate_snapshots: run " + std::to_string(s) +
                                ": " + err.what();
            }
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw std::runtime_error(error_message);
    return set;
}

GreedyResult greedy_select_inplace(SnapshotMatrix& Z, int m,
                                   double rel_tol_break) {
    const Eigen::Index n_rows = Z.rows();
    if (m < 1 || m > n_rows) {
        throw std::invalid_argument("greedy_select: m must be in [1, rows]");
    }

    GreedyResult result;
    std::vector<bool> taken(static_cast<std::size_t>(n_rows), false);
    std::vector<double> sq_norms(static_cast<std::size_t>(n_rows));
    double total_sq = 0.0;
    for (Eigen::Index i = 0; i < n_rows; ++i) {
        sq_norms[static_cast<std::size_t>(i)] = Z.row(i).squaredNorm();
        total_sq += sq_norms[static_cast<std::size_t>(i)];
    }
    const double initial_fro = std::sqrt(total_sq);

    for (int pick = 0; pick < m; ++pick) {
        // Largest remaining 2-norm; ties within 1e-12 relative go to the
        // lower original index (the scan order guarantees that).
        Eigen::Index best = -1;
        double best_sq = 0.0;
        for (Eigen::Index i = 0; i < n_rows; ++i) {
            if (taken[static_cast<std::size_t>(i)]) continue;
            const double sq = sq_norms[static_cast<std::size_t>(i)];
            if (best < 0 || sq > best_sq * (1.0 + 1e-12)) {
                best = i;
                best_sq = sq;
            }
        }
        const double best_norm = std::sqrt(best_sq);
        if (best < 0 || !(best_norm > initial_fro * 1e-14)) {
            result.rank_deficient = true;
            break;
        }
        if (rel_tol_break > 0.0 && !result.residual_fro.empty() &&
            result.residual_fro.back() <= rel_tol_break * initial_fro) {
            break;
        }

        taken[static_cast<std::size_t>(best)] = true;
        result.indices.push_back(best);
        Z.row(best) /= best_norm;

        // Deflate: remove the component along the selected direction from
        // every remaining row.
        double residual_sq = 0.0;
        for (Eigen::Index i = 0; i < n_rows; ++i) {
            if (taken[static_cast<std::size_t>(i)]) continue;
            const double proj = Z.row(i).dot(Z.row(best));
            Z.row(i) -= proj * Z.row(best);
            const double sq = Z.row(i).squaredNorm();
            sq_norms[static_cast<std::size_t>(i)] = sq;
            residual_sq += sq;
        }
        result.residual_fro.push_back(std::sqrt(residual_sq));
    }
    return result;
}

GreedyResult greedy_select(const Eigen::MatrixXd& Z, int m,
                           double rel_tol_break) {
    SnapshotMatrix work = Z;
    return greedy_select_inplace(work, m, rel_tol_break);
}

Eigen::MatrixXd solve_p(const Eigen::MatrixXd& target,
                        const Eigen::MatrixXd& z_s) {
    if (target.cols() != z_s.cols()) {
        throw std::invalid_argument("solve_p: column counts differ");
    }
    // min ‖target - P z_s‖_F  transposes to  min ‖z_sᵀ Pᵀ - targetᵀ‖_F.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(
        z_s.transpose());
    return cod.solve(target.transpose()).transpose();
}

Eigen::MatrixXd solve_p(const SnapshotMatrix& Z, const Eigen::MatrixXd& z_s,
                        const Eigen::MatrixXd& R, const Eigen::MatrixXd& A) {
    const Eigen::MatrixXd target = R.transpose() * A * Z;
    return solve_p(target, z_s);
}

BoucWenParams Rom::params() const {
    return BoucWenParams(A_bar, alpha, beta, n_h, gamma_h);
}

SecondOrderSystem Rom::reduced_system() const {
    SecondOrderSystem sys;
    sys.M = m_tilde.asDiagonal();
    sys.K = k_tilde.asDiagonal();
    sys.A = P;
    sys.B = B_s * R;
    return sys;
}

Rom build_rom(const BeamModel& model, const BoucWenParams& params,
              const SnapshotSet& snapshots, int r, int m) {
    require_matching_gamma(model, params, "build_rom");
    const ModalProjection basis = project_modal(model, r);

    Rom rom;
    rom.R = basis.R;
    rom.m_tilde = basis.m_tilde;
    rom.k_tilde = basis.k_tilde;
    rom.A_bar = params.A_bar;
    rom.alpha = params.alpha;
    rom.beta = params.beta;
    rom.n_h = params.n_h;
    rom.gamma_h = params.gamma_h;

    if (m == 0) {
        // Degenerate ROM: the linear modal part only, no hysteretic feedback.
        rom.P.resize(r, 0);
        rom.B_s.resize(0, model.B.cols());
        return rom;
    }

    // Rᵀ A Z must be formed before the greedy sweep consumes Z.
    const Eigen::MatrixXd rta = basis.R.transpose() * model.A;
    const Eigen::MatrixXd target = rta * snapshots.Z;

    SnapshotMatrix work = snapshots.Z;
    GreedyResult greedy = greedy_select_inplace(work, m);
    work.resize(0, 0);
    const auto m_got = static_cast<Eigen::Index>(greedy.indices.size());

    Eigen::MatrixXd z_s(m_got, snapshots.Z.cols());
    for (Eigen::Index i = 0; i < m_got; ++i) {
        z_s.row(i) = snapshots.Z.row(greedy.indices[static_cast<std::size_t>(i)]);
    }

    rom.P = solve_p(target, z_s);
    rom.indices.assign(greedy.indices.begin(), greedy.indices.end());
    rom.B_s.resize(m_got, model.B.cols());
    for (Eigen::Index i = 0; i < m_got; ++i) {
        rom.B_s.row(i) = model.B.row(greedy.indices[static_cast<std::size_t>(i)]);
    }
    return rom;
}

Trajectory simulate_rom(const Rom& rom, const Forcing& forcing,
                        const Eigen::VectorXd& xi0,
                        const Eigen::VectorXd& xidot0, double h, double T,
                        int stride, int tip_dof) {
    const SecondOrderSystem sys = rom.reduced_system();
    Forcing reduced;
    if (forcing.value) {
        const Eigen::MatrixXd rt = rom.R.transpose();
        reduced.value = [rt, f = forcing.value](double t) {
            return (rt * f(t)).eval();
        };
        if (forcing.derivative) {
            reduced.derivative = [rt, fd = forcing.derivative](double t) {
                return (rt * fd(t)).eval();
            };
        }
    }
    SimState ic;
    ic.q = xi0;
    ic.v = xidot0;
    ic.z = Eigen::VectorXd::Zero(sys.nz());
    SimulateOptions opt;
    opt.h = h;
    opt.T = T;
    opt.stride = stride;
    return simulate(sys, rom.params(), reduced, ic, opt, rom.R.row(tip_dof));
}

namespace {

void write_bytes(std::ofstream& out, const void* data, std::size_t n) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& in, void* data, std::size_t n) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("snapshot/rom file truncated");
}

void write_u64(std::ofstream& out, std::uint64_t v) { write_bytes(out, &v, 8); }

std::uint64_t read_u64(std::ifstream& in) {
    std::uint64_t v = 0;
    read_bytes(in, &v, 8);
    return v;
}

constexpr std::size_t kColumnChunk = 8192;

}  // namespace

void save_snapshots(const SnapshotSet& set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_snapshots: cannot open " + path.string());
    out.write("BWZ1", 4);
    const auto rows = static_cast<std::uint64_t>(set.Z.rows());
    const auto cols = static_cast<std::uint64_t>(set.Z.cols());
    write_u64(out, rows);
    write_u64(out, cols);
    write_u64(out, static_cast<std::uint64_t>(set.n_t));
    write_u64(out, static_cast<std::uint64_t>(set.n_s));
    write_u64(out, set.seed);

    // The in-memory layout is row-major; emit column-major in chunks.
    std::vector<double> buf(static_cast<std::size_t>(rows) * kColumnChunk);
    for (std::uint64_t c0 = 0; c0 < cols; c0 += kColumnChunk) {
        const auto nc = static_cast<Eigen::Index>(
            std::min<std::uint64_t>(kColumnChunk, cols - c0));
        Eigen::Map<Eigen::MatrixXd> chunk(buf.data(),
                                          static_cast<Eigen::Index>(rows), nc);
        chunk = set.Z.middleCols(static_cast<Eigen::Index>(c0), nc);
        write_bytes(out, buf.data(), sizeof(double) * rows * static_cast<std::size_t>(nc));
    }
    if (!out) throw std::runtime_error("save_snapshots: write failed");
}

namespace {

struct SnapshotHeader {
    std::uint64_t rows, cols, n_t, n_s, seed;
};

SnapshotHeader read_snapshot_header(std::ifstream& in,
                                    const std::filesystem::path& path) {
    char magic[4];
    read_bytes(in, magic, 4);
    if (std::memcmp(magic, "BWZ1", 4) != 0) {
        throw std::runtime_error("not a BWZ1 snapshot container: " + path.string());
    }
    SnapshotHeader h{};
    h.rows = read_u64(in);
    h.cols = read_u64(in);
    h.n_t = read_u64(in);
    h.n_s = read_u64(in);
    h.seed = read_u64(in);
    if (h.rows == 0 || h.cols == 0 || h.n_t * h.n_s != h.cols) {
        throw std::runtime_error("inconsistent snapshot header: " + path.string());
    }
    return h;
}

}  // namespace

SnapshotSet load_snapshots(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_snapshots: cannot open " + path.string());
    const SnapshotHeader h = read_snapshot_header(in, path);

    SnapshotSet set;
    set.n_t = static_cast<std::int64_t>(h.n_t);
    set.n_s = static_cast<std::int64_t>(h.n_s);
    set.seed = h.seed;
    set.Z.resize(static_cast<Eigen::Index>(h.rows),
                 static_cast<Eigen::Index>(h.cols));
    std::vector<double> buf(static_cast<std::size_t>(h.rows) * kColumnChunk);
    for (std::uint64_t c0 = 0; c0 < h.cols; c0 += kColumnChunk) {
        const auto nc = static_cast<Eigen::Index>(
            std::min<std::uint64_t>(kColumnChunk, h.cols - c0));
        read_bytes(in, buf.data(),
                   sizeof(double) * h.rows * static_cast<std::size_t>(nc));
        Eigen::Map<const Eigen::MatrixXd> chunk(
            buf.data(), static_cast<Eigen::Index>(h.rows), nc);
        set.Z.middleCols(static_cast<Eigen::Index>(c0), nc) = chunk;
    }
    return set;
}

Eigen::MatrixXd read_snapshot_rows(const std::filesystem::path& path,
                                   std::span<const Eigen::Index> rows) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_snapshot_rows: cannot open " + path.string());
    const SnapshotHeader h = read_snapshot_header(in, path);
    for (Eigen::Index r : rows) {
        if (r < 0 || static_cast<std::uint64_t>(r) >= h.rows) {
            throw std::invalid_argument("read_snapshot_rows: row out of range");
        }
    }

    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(h.cols));
    std::vector<double> buf(static_cast<std::size_t>(h.rows) * kColumnChunk);
    for (std::uint64_t c0 = 0; c0 < h.cols; c0 += kColumnChunk) {
        const auto nc = static_cast<Eigen::Index>(
            std::min<std::uint64_t>(kColumnChunk, h.cols - c0));
        read_bytes(in, buf.data(),
                   sizeof(double) * h.rows * static_cast<std::size_t>(nc));
        for (Eigen::Index c = 0; c < nc; ++c) {
            const double* col = buf.data() + static_cast<std::size_t>(c) * h.rows;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                out(static_cast<Eigen::Index>(i),
                    static_cast<Eigen::Index>(c0) + c) = col[rows[i]];
            }
        }
    }
    return out;
}

void save_rom(const Rom& rom, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_rom: cannot open " + path.string());
    out.write("BWR1", 4);
    const std::uint32_t version = 1;
    write_bytes(out, &version, 4);
    const auto N = static_cast<std::uint64_t>(rom.R.rows());
    const auto r = static_cast<std::uint64_t>(rom.R.cols());
    const auto m = static_cast<std::uint64_t>(rom.P.cols());
    write_u64(out, N);
    write_u64(out, r);
    write_u64(out, m);
    auto write_matrix = [&](const Eigen::MatrixXd& mat) {
        write_bytes(out, mat.data(), sizeof(double) * static_cast<std::size_t>(mat.size()));
    };
    write_matrix(rom.R);
    write_bytes(out, rom.m_tilde.data(), sizeof(double) * r);
    write_bytes(out, rom.k_tilde.data(), sizeof(double) * r);
    write_matrix(rom.P);
    write_matrix(rom.B_s);
    for (std::int64_t idx : rom.indices) {
        write_u64(out, static_cast<std::uint64_t>(idx));
    }
    const double params[5] = {rom.A_bar, rom.alpha, rom.beta, rom.n_h,
                              rom.gamma_h};
    write_bytes(out, params, sizeof(params));
    if (!out) throw std::runtime_error("save_rom: write failed");
}

Rom load_rom(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_rom: cannot open " + path.string());
    char magic[4];
    read_bytes(in, magic, 4);
    if (std::memcmp(magic, "BWR1", 4) != 0) {
        throw std::runtime_error("not a BWR1 rom file: " + path.string());
    }
    std::uint32_t version = 0;
    read_bytes(in, &version, 4);
    if (version != 1) {
        throw std::runtime_error("unsupported rom file version: " +
                                 std::to_string(version));
    }
    const auto N = static_cast<Eigen::Index>(read_u64(in));
    const auto r = static_cast<Eigen::Index>(read_u64(in));
    const auto m = static_cast<Eigen::Index>(read_u64(in));

    Rom rom;
    auto read_matrix = [&](Eigen::MatrixXd& mat, Eigen::Index rows,
                           Eigen::Index cols) {
        mat.resize(rows, cols);
        read_bytes(in, mat.data(), sizeof(double) * static_cast<std::size_t>(mat.size()));
    };
    read_matrix(rom.R, N, r);
    rom.m_tilde.resize(r);
    read_bytes(in, rom.m_tilde.data(), sizeof(double) * static_cast<std::size_t>(r));
    rom.k_tilde.resize(r);
    read_bytes(in, rom.k_tilde.data(), sizeof(double) * static_cast<std::size_t>(r));
    read_matrix(rom.P, r, m);
    read_matrix(rom.B_s, m, N);
    rom.indices.resize(static_cast<std::size_t>(m));
    for (auto& idx : rom.indices) idx = static_cast<std::int64_t>(read_u64(in));
    double params[5];
    read_bytes(in, params, sizeof(params));
    rom.A_bar = params[0];
    rom.alpha = params[1];
    rom.beta = params[2];
    rom.n_h = params[3];
    rom.gamma_h = params[4];
    return rom;
}

}  // namespace hysterobeam
