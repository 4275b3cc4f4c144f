#pragma once

#include <Eigen/Dense>

namespace hysterobeam {

/// Uniform cantilever mesh description. Validated on construction.
struct BeamGeometry {
    double length;     // L [m]
    double EI;         // flexural rigidity [N·m²]
    double rhoA;       // mass per unit length [kg/m]
    int n_elements;    // >= 1
    int n_gauss;       // hysteresis Gauss points per element, 1..10

    BeamGeometry(double length, double EI, double rhoA, int n_elements,
                 int n_gauss = 3);

    double element_length() const { return length / n_elements; }
    int n_dofs() const { return 2 * n_elements; }        // after clamping x = 0
    int n_hyst() const { return n_gauss * n_elements; }  // total Gauss points
};

/// Assembled global matrices for
///
///   M qdd + K q + A z = f0(t),   zdot = BW(z, chidot),   chi = B q,
///
/// with the two dofs of the clamped node eliminated (N = 2 n_e). z index k
/// and chi index k refer to the same Gauss point; points are ordered
/// element-major with ascending abscissa inside each element.
struct BeamModel {
    BeamGeometry geometry;
    double gamma_h;          // value baked into A [N·m]
    Eigen::MatrixXd M;       // N×N, SPD
    Eigen::MatrixXd K;       // N×N, SPD
    Eigen::MatrixXd A;       // N×(n_g·n_e), virtual-work weights
    Eigen::MatrixXd B;       // (n_g·n_e)×N, dofs -> curvatures
    Eigen::VectorXd gauss_x; // physical abscissae [m]

    /// Reduced index of the free-end translation dof.
    int tip_dof() const { return static_cast<int>(M.rows()) - 2; }
};

/// Element mass and stiffness matrices over [0, h_e] with cubic Hermite shape
/// functions, dof order (w1, theta1, w2, theta2):
///   M_e(i,j) = ∫ rhoA psi_i psi_j dx,  K_e(i,j) = ∫ EI psi_i'' psi_j'' dx.
struct ElementMatrices {
    Eigen::Matrix4d M_e;
    Eigen::Matrix4d K_e;
};
ElementMatrices build_element_matrices(const BeamGeometry& geometry);

/// Global coupling matrices before boundary-condition elimination is applied
/// to A's rows / B's columns (they are returned in the clamped layout,
/// matching assemble()). Per element e,
///   A block = (gamma_h h_e / 2) * Psibar_e * W,   B rows = psibar_i''(zeta_p),
/// so that chi = B q is the curvature at every Gauss point and A z is the
/// generalized hysteretic force.
struct CouplingMatrices {
    Eigen::MatrixXd A;        // N×(n_g·n_e)
    Eigen::MatrixXd B;        // (n_g·n_e)×N
    Eigen::VectorXd gauss_x;  // physical abscissae
};
CouplingMatrices build_coupling_matrices(const BeamGeometry& geometry,
                                         double gamma_h);

/// Assembles the full cantilever model. Clamped-end dofs are removed by
/// row/column deletion so M and K stay SPD.
BeamModel assemble(const BeamGeometry& geometry, double gamma_h);

/// First r undamped eigenpairs of (K - omega² M) v = 0. Columns of R are
/// M-orthonormal (Rᵀ M R = I) and frequencies are in Hz, ascending.
struct ModalResult {
    Eigen::VectorXd frequencies_hz;
    Eigen::MatrixXd R;  // N×r
};
ModalResult modal_analysis(const BeamModel& model, int r);

}  // namespace hysterobeam
