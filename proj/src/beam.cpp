#include "hysterobeam/beam.hpp"

#include <cmath>
#include <stdexcept>

#include "hysterobeam/gauss.hpp"

namespace hysterobeam {

namespace {

// Second derivatives of the cubic Hermite shape functions on [0, h],
// evaluated at s = x/h in [0, 1]. Dof order (w1, theta1, w2, theta2).
inline Eigen::Vector4d hermite_dd(double s, double h) {
    return {(-6.0 + 12.0 * s) / (h * h),
            (-4.0 + 6.0 * s) / h,
            (6.0 - 12.0 * s) / (h * h),
            (-2.0 + 6.0 * s) / h};
}

}  // namespace

BeamGeometry::BeamGeometry(double length_, double EI_, double rhoA_,
                           int n_elements_, int n_gauss_)
    : length(length_), EI(EI_), rhoA(rhoA_), n_elements(n_elements_),
      n_gauss(n_gauss_) {
    if (!(length > 0.0)) throw std::invalid_argument("BeamGeometry: length must be > 0");
    if (!(EI > 0.0)) throw std::invalid_argument("BeamGeometry: EI must be > 0");
    if (!(rhoA > 0.0)) throw std::invalid_argument("BeamGeometry: rhoA must be > 0");
    if (n_elements < 1) throw std::invalid_argument("BeamGeometry: n_elements must be >= 1");
    if (n_gauss < 1 || n_gauss > 10) {
        throw std::invalid_argument("BeamGeometry: n_gauss must be in [1, 10]");
    }
}

ElementMatrices build_element_matrices(const BeamGeometry& geometry) {
    const double h = geometry.element_length();
    const double h2 = h * h;

    ElementMatrices out;
    const double km = geometry.EI / (h * h2);
    out.K_e << 12.0 * km, 6.0 * h * km, -12.0 * km, 6.0 * h * km,
               6.0 * h * km, 4.0 * h2 * km, -6.0 * h * km, 2.0 * h2 * km,
               -12.0 * km, -6.0 * h * km, 12.0 * km, -6.0 * h * km,
               6.0 * h * km, 2.0 * h2 * km, -6.0 * h * km, 4.0 * h2 * km;

    const double mm = geometry.rhoA * h / 420.0;
    out.M_e << 156.0 * mm, 22.0 * h * mm, 54.0 * mm, -13.0 * h * mm,
               22.0 * h * mm, 4.0 * h2 * mm, 13.0 * h * mm, -3.0 * h2 * mm,
               54.0 * mm, 13.0 * h * mm, 156.0 * mm, -22.0 * h * mm,
               -13.0 * h * mm, -3.0 * h2 * mm, -22.0 * h * mm, 4.0 * h2 * mm;
    return out;
}

CouplingMatrices build_coupling_matrices(const BeamGeometry& geometry,
                                         double gamma_h) {
    if (!(gamma_h >= 0.0)) {
        throw std::invalid_argument("build_coupling_matrices: gamma_h must be >= 0");
    }
    const int n_e = geometry.n_elements;
    const int n_g = geometry.n_gauss;
    const int N = geometry.n_dofs();
    const double h = geometry.element_length();
    const auto rule = gauss_legendre(n_g);

    CouplingMatrices out;
    out.A = Eigen::MatrixXd::Zero(N, geometry.n_hyst());
    out.B = Eigen::MatrixXd::Zero(geometry.n_hyst(), N);
    out.gauss_x.resize(geometry.n_hyst());

    for (int e = 0; e < n_e; ++e) {
        for (int p = 0; p < n_g; ++p) {
            const double zeta = rule[p].node;
            const double s = 0.5 * (1.0 + zeta);
            const int col = e * n_g + p;  // Gauss-point id, element-major
            out.gauss_x[col] = (e + s) * h;

            const Eigen::Vector4d psi_dd = hermite_dd(s, h);
            const double a_scale = gamma_h * h / 2.0 * rule[p].weight;
            // Element e couples nodes e and e+1; node 0 is clamped, so the
            // first two element dofs of element 0 are dropped.
            for (int i = 0; i < 4; ++i) {
                const int dof = 2 * e + i - 2;  // reduced numbering
                if (dof < 0) continue;
                out.A(dof, col) = a_scale * psi_dd[i];
                out.B(col, dof) = psi_dd[i];
            }
        }
    }
    return out;
}

BeamModel assemble(const BeamGeometry& geometry, double gamma_h) {
    const int n_e = geometry.n_elements;
    const int N = geometry.n_dofs();
    const ElementMatrices em = build_element_matrices(geometry);

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N, N);
    for (int e = 0; e < n_e; ++e) {
        for (int i = 0; i < 4; ++i) {
            const int gi = 2 * e + i - 2;
            if (gi < 0) continue;
            for (int j = 0; j < 4; ++j) {
                const int gj = 2 * e + j - 2;
                if (gj < 0) continue;
                M(gi, gj) += em.M_e(i, j);
                K(gi, gj) += em.K_e(i, j);
            }
        }
    }

    CouplingMatrices cm = build_coupling_matrices(geometry, gamma_h);
    return BeamModel{geometry, gamma_h, std::move(M), std::move(K),
                     std::move(cm.A), std::move(cm.B), std::move(cm.gauss_x)};
}

ModalResult modal_analysis(const BeamModel& model, int r) {
    const int N = static_cast<int>(model.M.rows());
    if (r < 1 || r > N) {
        throw std::invalid_argument("modal_analysis: r must be in [1, N]");
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(model.K,
                                                                     model.M);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("modal_analysis: generalized eigensolver failed");
    }
    // Eigen returns ascending eigenvalues with vᵀ M v = 1 normalization.
    ModalResult out;
    out.frequencies_hz = (solver.eigenvalues().head(r).cwiseMax(0.0))
                             .cwiseSqrt() / (2.0 * M_PI);
    out.R = solver.eigenvectors().leftCols(r);
    // Fix sign convention: tip translation component positive.
    const int tip = model.tip_dof();
    for (int j = 0; j < r; ++j) {
        if (out.R(tip, j) < 0.0) out.R.col(j) = -out.R.col(j);
    }
    return out;
}

}  // namespace hysterobeam
