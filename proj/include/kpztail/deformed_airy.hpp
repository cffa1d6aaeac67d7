#pragma once

#include <memory>
#include <vector>

#include "kpztail/common.hpp"
#include "kpztail/contour.hpp"

namespace kpztail::airy {

struct DeformedAiryParams {
    double x = 0;
    double kappa_inv = 1;  // 2^{1/3} T^{-1/3}
    double shift = 0;      // fixed at 0 in this library

    static DeformedAiryParams from_T(double x, double T) {
        if (!(T > 0)) throw std::invalid_argument("DeformedAiryParams: T must be > 0");
        return {x, 1.0 / kappa_of_T(T), 0.0};
    }
    double T() const { return 2.0 / (kappa_inv * kappa_inv * kappa_inv); }
    double kappa() const { return 1.0 / kappa_inv; }
};

/// Which branch of the case analysis selected the evaluation contour.
enum class ContourCase {
    upper_x_pos,
    upper_case1,
    upper_case2,
    upper_case3,
    lower_case1_pos,
    lower_case2_pos,
    lower_case1_neg,
    lower_case2_neg,
};

const char* to_string(ContourCase c);

struct AiryEvalResult {
    double value = 0;
    double imag_residual = 0;
    ContourCase contour_case{};
    contour::QuadResult quad;
};

/// Ai^Gamma(x, kappa^{-1}, 0) = (2 pi i)^{-1} Int e^{-z^3/3 + x z} Gamma(kappa^{-1} z) dz
/// over a contour right of z = 0, evaluated on the regime-dependent deformed
/// contour (vertical line s0 + i t picking up the residue kappa_T at z = 0,
/// or the rescaled wedge through +-i for x << 0).
AiryEvalResult ai_upper_gamma(const DeformedAiryParams& p,
                              const Config& cfg = default_config());

/// Ai_Gamma(x, kappa^{-1}, 0) = (2 pi i)^{-1} Int e^{z^3/3 - x z} / Gamma(kappa^{-1} z) dz,
/// entire integrand, evaluated on the line 1 + i r, the steepest-descent rays
/// through 1, or the chevron through +-i depending on the regime.
AiryEvalResult ai_lower_gamma(const DeformedAiryParams& p,
                              const Config& cfg = default_config());

/// Classical Ai(x) via the rays-through-1 contour (machinery validation).
double airy_classical(double x, const Config& cfg = default_config());
double airy_classical_deriv(double x, const Config& cfg = default_config());

// --- contour factories (also used by deformation-consistency tests) ---

/// Generic undeformed wedge for the Ai^Gamma integrand: vertex on the positive
/// real axis, rays at angles +-2 pi/3.
contour::Contour upper_undeformed_contour(double x, double truncation_hint = 0,
                                          double vertex = 0.5);
/// Vertical line s0 + i t with s0 = -kappa_{T0}/2, truncated.
contour::Contour upper_line_contour(double x, double T0, double truncation_hint = 0);
/// Generic undeformed wedge for the Ai_Gamma integrand: vertex 1, rays +-pi/3.
contour::Contour lower_undeformed_contour(double x, double kappa_inv,
                                          double truncation_hint = 0, double vertex = 1.0);

/// Integrands in the z-plane (shared by tests and deform checks).
contour::Integrand upper_integrand(double x, double kappa_inv);
contour::Integrand lower_integrand(double x, double kappa_inv);

/// Residue of e^{-z^3/3 + x z} Gamma(kappa^{-1} z) at z = 0: equals kappa_T.
double upper_residue_at_zero(double kappa_inv);

/// Piecewise-Chebyshev cache of Ai^Gamma and Ai_Gamma at fixed T, built once
/// and immutable afterwards (safe for concurrent reads). Falls back to the
/// direct evaluators outside the tabulated range; upper saturates to kappa_T
/// and lower to 0 above the range.
class TabulatedAiry {
public:
    TabulatedAiry(double T, const Config& cfg = default_config(), double lo = -80.0,
                  double hi = 42.0);
    double upper(double v) const;
    double lower(double v) const;
    double T() const { return T_; }
    double kappa() const { return kappa_; }
    /// max relative-to-window-scale validation error observed at build time
    double build_error() const { return build_err_; }

private:
    double T_, kappa_;
    Config cfg_;
    double lo_, hi_, width_;
    int npts_;
    std::vector<std::vector<double>> up_, lo_vals_;
    std::vector<double> nodes_, bary_;
    double build_err_ = 0;
    double eval(const std::vector<std::vector<double>>& tab, double v) const;
};

} // namespace kpztail::airy
