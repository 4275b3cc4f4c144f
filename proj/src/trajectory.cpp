#include "hysterobeam/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hysterobeam {

std::size_t Trajectory::index_at(double t) const {
    // Samples are strictly increasing; binary search then tolerance check.
    auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12);
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    if (it != times.end() && std::abs(*it - t) <= tol) {
        return static_cast<std::size_t>(it - times.begin());
    }
    if (it != times.begin() && std::abs(*(it - 1) - t) <= tol) {
        return static_cast<std::size_t>(it - times.begin()) - 1;
    }
    throw std::invalid_argument("Trajectory: t = " + std::to_string(t) +
                                " is not a sample instant");
}

void write_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());

    const bool full = traj.q.size() > 0;
    out << "t,y_tip";
    if (full) {
        for (Eigen::Index i = 0; i < traj.q.rows(); ++i) out << ",q" << i;
        for (Eigen::Index i = 0; i < traj.v.rows(); ++i) out << ",v" << i;
        for (Eigen::Index i = 0; i < traj.z.rows(); ++i) out << ",z" << i;
    }
    out << "\n";

    char buf[32];
    auto put = [&](double x, char sep) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        out << buf << sep;
    };
    for (std::size_t k = 0; k < traj.size(); ++k) {
        put(traj.times[k], ',');
        if (!full) {
            std::snprintf(buf, sizeof(buf), "%.17g", traj.tip[k]);
            out << buf << "\n";
            continue;
        }
        put(traj.tip[k], ',');
        const auto col = static_cast<Eigen::Index>(k);
        std::string line;
        for (Eigen::Index i = 0; i < traj.q.rows(); ++i) put(traj.q(i, col), ',');
        for (Eigen::Index i = 0; i < traj.v.rows(); ++i) put(traj.v(i, col), ',');
        for (Eigen::Index i = 0; i < traj.z.rows(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", traj.z(i, col));
            out << buf << (i + 1 == traj.z.rows() ? '\n' : ',');
        }
    }
}

Trajectory read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,y_tip", 0) != 0) {
        throw std::runtime_error("read_csv: missing `t,y_tip` header in " +
                                 path.string());
    }
    Trajectory traj;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        if (!std::getline(row, cell, ',')) break;
        const double t = std::stod(cell);
        if (!std::getline(row, cell, ',')) {
            throw std::runtime_error("read_csv: truncated row in " + path.string());
        }
        traj.times.push_back(t);
        traj.tip.push_back(std::stod(cell));
    }
    return traj;
}

}  // namespace hysterobeam
