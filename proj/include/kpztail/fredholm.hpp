#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kpztail/common.hpp"
#include "kpztail/kernel_ops.hpp"

namespace kpztail::fredholm {

/// Gauss-Legendre nodes mapped onto (s, inf) by x = s + L(1+u)/(1-u).
struct NystromGrid {
    int n = 0;
    double s = 0, L = 1;
    std::vector<double> nodes;    // on (s, inf), strictly increasing
    std::vector<double> weights;  // mapped weights, positive
    std::vector<double> ref_weights; // weights on the reference interval (-1,1)

    static NystromGrid build(double s, double L, int n);
    std::string map_description() const;
};

using KernelFn = std::function<Complex(double, double)>;

/// delta_ij - sqrt(w_i) K(x_i, x_j) sqrt(w_j), row-major.
std::vector<Complex> nystrom_matrix(const NystromGrid& g, const KernelFn& K);
/// D_ij = sqrt(w_i) K(x_i, x_j) sqrt(w_j) (without the identity).
std::vector<Complex> scaled_kernel_matrix(const NystromGrid& g, const KernelFn& K);

/// LU determinant with partial pivoting (destroys m).
Complex lu_det(std::vector<Complex>& m, int n);

/// det(I - D) - 1 without forming the identity: Plemelj-Smithies trace
/// series when ||D||_F is small, expm1 of the LU log-determinant otherwise.
/// Accurate relative to the (possibly tiny) difference itself.
Complex det_i_minus_d_minus_one(const std::vector<Complex>& D, int n);

/// Plemelj-Smithies expansion det(I - D) - 1 = sum_{k>=1} (-1)^k e_k truncated
/// at kmax, with e_k from Newton's identities on p_k = tr(D^k).
Complex trace_series_det_minus_one(const std::vector<Complex>& D, int n, int kmax);

struct DetResult {
    Complex det{1, 0};
    int n = 0;
    Complex richardson{1, 0};
    bool converged = false;
    double last_delta = 0;
};

/// LU-based Fredholm determinant with node doubling from n_start until
/// successive determinants differ by < det_tol (or the node cap).
DetResult nystrom_det(const KernelFn& K, double s, double L, double det_tol,
                      int n_start = 8, int n_cap = 1024);

/// Convenience overload wiring in the crossover kernel.
DetResult nystrom_det(const op::KernelSpec& spec, int n_start = 8,
                      const Config& cfg = default_config(),
                      const airy::TabulatedAiry* tab = nullptr);

struct DetBoundReport {
    double lhs = 0;          // |det(I - K~) - 1|
    double rhs = 0;          // ||A1|| ||A2|| e^{||A1|| ||A2|| + 1}
    double slack_ratio = 0;  // rhs / lhs
    bool ok = false;
    double norm_a1 = 0, norm_a2 = 0;
    Complex det{1, 0};
    double numerical_error = 0;
};

/// Checks |det(I - K~_{T,mu}) - 1| <= ||A1||_2 ||A2||_2 e^{||A1||_2 ||A2||_2 + 1}.
DetBoundReport det_bound_check(const op::KernelSpec& spec,
                               const Config& cfg = default_config(),
                               const airy::TabulatedAiry* tab = nullptr);

} // namespace kpztail::fredholm
