#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

namespace hysterobeam {

/// Time-stamped simulation output. `tip` holds the scalar output (tip
/// displacement for beam runs); q/v/z are optional full-state samples stored
/// one column per sample and left 0×0 when not recorded.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> tip;
    Eigen::MatrixXd q;
    Eigen::MatrixXd v;
    Eigen::MatrixXd z;
    double h = 0.0;   // step size used to produce the samples (0 if unknown)
    int stride = 1;

    std::size_t size() const { return times.size(); }

    /// Index of the sample at time t (within 1e-9 absolute + relative slack);
    /// throws std::invalid_argument if t is not a sample instant.
    std::size_t index_at(double t) const;

    double value_at(double t) const { return tip[index_at(t)]; }
};

/// CSV with header `t,y_tip`, '.' decimal separator, ',' field separator, LF
/// line endings, 17 significant digits. When full-state columns are present
/// they are appended as q0..,v0..,z0.. after y_tip.
void write_csv(const Trajectory& traj, const std::filesystem::path& path);

/// Reads back t and y_tip (full-state columns are ignored).
Trajectory read_csv(const std::filesystem::path& path);

}  // namespace hysterobeam
