#pragma once

#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kpztail {

using Complex = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

/// Thrown when an iterative numerical procedure fails to converge.
/// Carries the best estimate obtained so far.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, Complex best_estimate, double error_estimate)
        : std::runtime_error(what), best(best_estimate), err(error_estimate) {}
    Complex best;
    double err;
};

/// kappa_T = 2^{-1/3} T^{1/3}, the deformation scale coupling time T to the
/// gamma factor in the deformed Airy integrands.
inline double kappa_of_T(double T) {
    return std::cbrt(T / 2.0);
}

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// e^w - 1 without cancellation for small |w|.
inline Complex expm1_complex(Complex w) {
    double a = w.real(), b = w.imag();
    double em = std::expm1(a);
    double cb = std::cos(b), sb = std::sin(b);
    double c1 = -2.0 * std::sin(0.5 * b) * std::sin(0.5 * b); // cos(b) - 1
    return {em * cb + c1, (em + 1.0) * sb};
}

/// Library-level configuration shared by the evaluators.
struct Config {
    double T0 = 1.0;          // lower bound of the admissible T range
    double abs_tol = 1e-10;   // default quadrature tolerance
    double rel_tol = 1e-11;   // relative floor used alongside abs_tol
    double det_tol = 1e-8;    // Nystrom determinant convergence tolerance
    int max_nodes_per_segment = 1 << 14;
    int det_node_cap = 1024;
    // fixed-panel densities of the crossover tail quadratures
    double tail_t_panel = 1.0;
    double tail_mu_panel = 1.0;
    int tail_arc_panels = 6;
};

inline const Config& default_config() {
    static const Config cfg{};
    return cfg;
}

} // namespace kpztail
