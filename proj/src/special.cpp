#include "kpztail/special.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace kpztail::special {

namespace {

// Lanczos coefficients, N=13, g=6.024680040776729583740234375
// (the standard double-precision set; max quoted error ~1.2e-17).
constexpr double kLanczosG = 6.024680040776729583740234375;

constexpr std::array<double, 13> kLanczosNum = {
    23531376880.410759688572007674451636754734846804940,
    42919803642.649098768957899047001988850926355848959,
    35711959237.355668049440185451547166705960488635843,
    17921034426.037209699919755754458931112671854987399,
    6039542586.3520280050642916443603701060023338349568,
    1439720407.3117216736632230727949123939715485786772,
    248874557.86205415651146038641322942321632125127801,
    31426415.585400194380614231628318205362874684987640,
    2876370.6289353724412254090516208496135991145378768,
    186056.26539522349504029498971604569928220784236328,
    8071.6720023658162106380029022722506138218516325024,
    210.82427775157934587250973392071336271166969580291,
    2.5066282746310002701649081771338373386264310793408,
};

constexpr std::array<double, 13> kLanczosDen = {
    0, 39916800, 120543840, 150917976, 105258076, 45995730,
    13339535, 2637558, 357423, 32670, 1925, 66, 1,
};

// Rational evaluation num(z)/den(z); evaluated in 1/z for |z| > 1 so large
// arguments stay well-conditioned.
Complex lanczos_sum(Complex z) {
    constexpr int n = 13;
    Complex num = 0.0, den = 0.0;
    if (std::abs(z) <= 1.0) {
        for (int i = n - 1; i >= 0; --i) {
            num = num * z + kLanczosNum[i];
            den = den * z + kLanczosDen[i];
        }
    } else {
        Complex iz = 1.0 / z;
        for (int i = 0; i < n; ++i) {
            num = num * iz + kLanczosNum[i];
            den = den * iz + kLanczosDen[i];
        }
    }
    return num / den;
}

Complex log_gamma_right(Complex z) {
    // valid for Re(z) >= 0.5
    Complex zgh = z + (kLanczosG - 0.5);
    return (z - 0.5) * std::log(zgh) - zgh + std::log(lanczos_sum(z));
}

double dist_to_nonpositive_integer(Complex z) {
    if (z.real() > 0.5) return std::numeric_limits<double>::infinity();
    double k = std::round(z.real());
    if (k > 0) k = 0;
    return std::abs(z - Complex(k, 0));
}

} // namespace

Complex log_sin(Complex z) {
    // sin z = (i/2) e^{-iz} (1 - e^{2iz})   for Im z >= 0
    //       = (-i/2) e^{iz} (1 - e^{-2iz})  for Im z <  0
    const Complex i(0, 1);
    if (z.imag() >= 0) {
        return std::log(Complex(0, 0.5)) - i * z + std::log(-expm1_complex(2.0 * i * z));
    }
    return std::log(Complex(0, -0.5)) + i * z + std::log(-expm1_complex(-2.0 * i * z));
}

namespace {

// log(sin(pi z)) with the real part reduced to |Re| <= 1/2 so that near-pole
// arguments do not amplify the rounding of pi*z
Complex log_sin_pi(Complex z) {
    double k = std::round(z.real());
    Complex w = z - k;
    Complex ls = log_sin(kPi * w);
    if (std::fmod(std::fabs(k), 2.0) == 1.0) ls += Complex(0, kPi); // (-1)^k
    return ls;
}

} // namespace

Complex log_gamma(Complex z) {
    if (z.real() >= 0.5) return log_gamma_right(z);
    // reflection: Gamma(z) = pi / (sin(pi z) Gamma(1 - z))
    return std::log(Complex(kPi, 0)) - log_sin_pi(z) - log_gamma_right(1.0 - z);
}

Complex gamma(Complex z) {
    if (dist_to_nonpositive_integer(z) < 1e-12) {
        throw std::domain_error("gamma: argument within 1e-12 of a nonpositive integer");
    }
    return std::exp(log_gamma(z));
}

Complex recip_gamma(Complex z) {
    if (z.real() >= 0.5) return std::exp(-log_gamma_right(z));
    // 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi ; vanishes at the poles.
    Complex ls = log_sin_pi(z);
    if (ls.real() == -std::numeric_limits<double>::infinity()) return {0, 0};
    return std::exp(ls + log_gamma_right(1.0 - z) - std::log(kPi));
}

StirlingReport check_stirling_sandwich(double x) {
    if (!(x > 0)) throw std::invalid_argument("check_stirling_sandwich: x must be > 0");
    StirlingReport r;
    r.x = x;
    // compute in log space: log middle = -log(2 pi)/2 + (1/2 - x) log x + x + lgamma(x)
    double lm = -0.5 * std::log(kTwoPi) + (0.5 - x) * std::log(x) + x + std::lgamma(x);
    r.middle = std::exp(lm);
    r.upper_bound = std::exp(1.0 / (12.0 * x));
    r.lower_margin = r.middle - 1.0;
    r.upper_margin = r.upper_bound - r.middle;
    r.ok = (r.lower_margin > 0) && (r.upper_margin > 0);
    return r;
}

StirlingReport check_stirling_sandwich_range(double x_lo, double x_hi, int samples) {
    if (!(x_lo > 0) || !(x_hi > x_lo) || samples < 2) {
        throw std::invalid_argument("check_stirling_sandwich_range: bad range");
    }
    StirlingReport worst;
    double worst_margin = std::numeric_limits<double>::infinity();
    double llo = std::log(x_lo), lhi = std::log(x_hi);
    for (int i = 0; i < samples; ++i) {
        double x = std::exp(llo + (lhi - llo) * i / (samples - 1));
        StirlingReport r = check_stirling_sandwich(x);
        double margin = std::min(r.lower_margin, r.upper_margin);
        if (!r.ok) return r;
        if (margin < worst_margin) {
            worst_margin = margin;
            worst = r;
        }
    }
    return worst;
}

GammaEnvelopeReport check_recip_gamma_envelope(const Rectangle& region, double grid_step) {
    if (!(region.re_min > 0)) {
        throw std::invalid_argument("check_recip_gamma_envelope: region must lie in Re(z) > 0");
    }
    if (!(grid_step > 0) &&
        !(region.re_min == region.re_max && region.im_min == region.im_max)) {
        throw std::invalid_argument("check_recip_gamma_envelope: grid_step must be > 0");
    }
    GammaEnvelopeReport rep;
    rep.region = region;
    rep.grid_step = grid_step;
    auto probe = [&rep](double re, double im) {
        Complex z(re, im);
        double ratio = std::abs(recip_gamma(z)) * std::exp(-2.0 * std::abs(z));
        if (!std::isfinite(ratio)) {
            ++rep.violations;
            return;
        }
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.argmax_point = z;
        }
    };
    long nre = (region.re_max > region.re_min)
                   ? std::lround(std::floor((region.re_max - region.re_min) / grid_step)) + 1
                   : 1;
    long nim = (region.im_max > region.im_min)
                   ? std::lround(std::floor((region.im_max - region.im_min) / grid_step)) + 1
                   : 1;
    for (long i = 0; i < nre; ++i) {
        double re = region.re_min + grid_step * static_cast<double>(i);
        for (long j = 0; j < nim; ++j) {
            probe(re, region.im_min + grid_step * static_cast<double>(j));
        }
    }
    return rep;
}

} // namespace kpztail::special
