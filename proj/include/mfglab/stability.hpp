#pragma once

#include <array>
#include <complex>
#include <string_view>
#include <utility>
#include <vector>

#include "mfglab/grid_ode.hpp"
#include "mfglab/mfg.hpp"
#include "mfglab/model.hpp"

namespace mfglab::stability {

/// M[i][j] = K(t_i, t_j)·T/n on t_i = iT/n, i = 1..n, stored row-major.
struct KernelMatrix {
    int n = 0;
    double horizon = 0.0;
    std::vector<double> entries;

    double operator()(int i, int j) const { return entries[static_cast<std::size_t>(i) * n + j]; }
    double& operator()(int i, int j) { return entries[static_cast<std::size_t>(i) * n + j]; }
    double node(int i) const { return (i + 1) * horizon / n; }
    std::vector<double> apply(const std::vector<double>& v) const;
};

/// Closed-form kernel around the zero trajectory: e^{−2η(t∨u)} sinh(2η(t∧u))/2η,
/// and t∧u at η = 0.
double zero_traj_kernel(double eta, double t, double u);
KernelMatrix kernel_zero_traj(double eta, double horizon, int n);

/// Kernel around a nonzero follow-the-crowd trajectory at η = 0, on the nodes
/// of the solution grid. Throws UnsupportedCase for η ≠ 0.
KernelMatrix kernel_nonzero_traj(const mfg::MfgSolution& solution, double eta);

/// Dominant eigenvalue by power iteration from the all-ones vector; stops when
/// successive Rayleigh quotients differ by less than `tol`.
double largest_eigenvalue(const KernelMatrix& kernel, double tol = 1e-12, int max_iter = 100000);

/// The `count` largest eigenvalues by power iteration with deflation.
std::vector<double> leading_eigenvalues(const KernelMatrix& kernel, int count, double tol = 1e-12,
                                        int max_iter = 100000);

/// λ_k = (2T/((2k+1)π))² and h_k(t) = sin((2k+1)πt/2T) on the kernel nodes.
std::pair<double, std::vector<double>> mercer_reference(double horizon, int k, int n);

struct NormBound {
    double c = 0.0;          ///< (1 − e^{−2ηT})/2η, or T at η = 0
    double c_squared = 0.0;  ///< the operator bound
    bool contraction = false;
};

NormBound operator_norm_bound(double eta, double horizon);

/// Horizon where λ_max of the zero-trajectory kernel crosses 1, by bisection
/// to 1e-3. Throws InvalidArgument when the bracket has no sign change.
double eigenvalue_crossing(double eta, int n, std::pair<double, double> bracket);

/// (𝒯(x̄ + εh) − 𝒯(x̄))/ε in x coordinates, on the nodes of the solution grid.
/// h is given at nodes 1..n; x̄ at node 0 stays pinned.
std::vector<double> gateaux_difference(const CostModel& model, const mfg::MfgSolution& solution,
                                       const std::vector<double>& direction, double epsilon = 1e-5);

enum class Classification { las, not_las_imaginary, not_las_degenerate };
std::string_view to_string(Classification c);

struct StabilityReport {
    mfg::XYState point;
    /// [[H_xy, H_yy], [−H_xx, −H_xy]]; for follow the printed form with H_yy = 1.
    std::array<double, 4> a{};
    std::array<std::complex<double>, 2> eigenvalues{};
    Classification classification = Classification::not_las_degenerate;
    /// Same matrix built from the full Hessian, H_yy = 1 − x·sgn(y).
    std::array<double, 4> exact_a{};
    std::array<std::complex<double>, 2> exact_eigenvalues{};
    Classification exact_classification = Classification::not_las_degenerate;
};

/// Throws InvalidArgument unless ∇H(point) = 0 within 1e-9.
StabilityReport linear_stability(mfg::Game game, double eta, mfg::XYState point);

}  // namespace mfglab::stability
