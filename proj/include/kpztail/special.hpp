#pragma once

#include <vector>

#include "kpztail/common.hpp"

namespace kpztail::special {

/// Principal-branch log of Gamma up to multiples of 2*pi*i (the ambiguity is
/// irrelevant because every consumer exponentiates). Uses the Lanczos
/// rational approximation for Re(z) >= 0.5 and the reflection formula
/// otherwise, with a large-imaginary-part-stable log(sin).
Complex log_gamma(Complex z);

/// Complex Gamma. Relative accuracy ~1e-13 for |z| <= 50.
/// Throws std::domain_error when z is within 1e-12 of a nonpositive integer.
Complex gamma(Complex z);

/// 1/Gamma, entire: returns 0 at the poles of Gamma instead of throwing.
Complex recip_gamma(Complex z);

/// log(sin(z)) stable for large |Im z| (value mod 2*pi*i).
Complex log_sin(Complex z);

struct StirlingReport {
    double x = 0;
    double middle = 0;       // (2 pi)^{-1/2} x^{1/2 - x} e^x Gamma(x)
    double upper_bound = 0;  // e^{1/(12 x)}
    double lower_margin = 0; // middle - 1
    double upper_margin = 0; // upper_bound - middle
    bool ok = false;
};

/// Checks 1 < (2 pi)^{-1/2} x^{(1/2)-x} e^x Gamma(x) < e^{1/(12x)} at
/// `samples` log-spaced points in [x_lo, x_hi]. Returns the report of the
/// worst point (smallest min margin); ok is true iff no point violates.
StirlingReport check_stirling_sandwich(double x);
StirlingReport check_stirling_sandwich_range(double x_lo, double x_hi, int samples);

struct Rectangle {
    double re_min = 0, re_max = 0, im_min = 0, im_max = 0;
};

struct GammaEnvelopeReport {
    Rectangle region;
    double grid_step = 0;
    double max_ratio = 0;    // empirical C with |1/Gamma(z)| <= C e^{2|z|}
    Complex argmax_point{0, 0};
    long violations = 0;     // non-finite ratios encountered
};

/// Scans |1/Gamma(z)| e^{-2|z|} over a grid on a rectangle in Re(z) > 0.
GammaEnvelopeReport check_recip_gamma_envelope(const Rectangle& region, double grid_step);

} // namespace kpztail::special
