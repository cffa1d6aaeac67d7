#include "kpztail/deformed_airy.hpp"

#include <algorithm>
#include <cmath>

#include "kpztail/special.hpp"

namespace kpztail::airy {

using contour::Arc;
using contour::Contour;
using contour::Integrand;
using contour::Line;
using contour::Ray;

namespace {

constexpr double kExpCut = 52.0; // e^{-52} ~ 2.6e-23, below every quadrature tolerance


AiryEvalResult finish(Complex raw, ContourCase cc, const contour::QuadResult& q,
                      double residue_correction) {
    Complex v = raw / Complex(0, kTwoPi) + residue_correction;
    AiryEvalResult r;
    r.value = v.real();
    r.imag_residual = std::abs(v.imag());
    r.contour_case = cc;
    r.quad = q;
    if (r.imag_residual > 1e-8 * std::max(1.0, std::abs(r.value))) {
        throw NumericalError("deformed airy: imaginary residual exceeds tolerance", v,
                             r.imag_residual);
    }
    return r;
}

// truncation radius for the vertical line s0 + i t: Gaussian decay e^{s0 t^2}
double line_truncation(double x, double s0) {
    double a = std::abs(s0);
    return std::sqrt((kExpCut + std::abs(x * s0) + a * a * a / 3.0 + 4.0) / a);
}

} // namespace

const char* to_string(ContourCase c) {
    switch (c) {
        case ContourCase::upper_x_pos: return "upper_x_pos";
        case ContourCase::upper_case1: return "upper_case1";
        case ContourCase::upper_case2: return "upper_case2";
        case ContourCase::upper_case3: return "upper_case3";
        case ContourCase::lower_case1_pos: return "lower_case1_pos";
        case ContourCase::lower_case2_pos: return "lower_case2_pos";
        case ContourCase::lower_case1_neg: return "lower_case1_neg";
        case ContourCase::lower_case2_neg: return "lower_case2_neg";
    }
    return "?";
}

Integrand upper_integrand(double x, double kappa_inv) {
    return [x, kappa_inv](Complex z) {
        return std::exp(-z * z * z / 3.0 + x * z + special::log_gamma(kappa_inv * z));
    };
}

Integrand lower_integrand(double x, double kappa_inv) {
    return [x, kappa_inv](Complex z) {
        return std::exp(z * z * z / 3.0 - x * z - special::log_gamma(kappa_inv * z));
    };
}

double upper_residue_at_zero(double kappa_inv) { return 1.0 / kappa_inv; }

Contour upper_undeformed_contour(double x, double truncation_hint, double vertex) {
    // rays at +-2 pi/3: Re(z^3)/3 ~ r^3/3 along the rays; e^{x z} grows like
    // e^{x(v - r/2)} for x > 0 before the cubic takes over
    double R = 6.0;
    for (int it = 0; it < 4; ++it) {
        R = std::cbrt(3.0 * (kExpCut + std::max(0.0, x) * (vertex + R / 2.0) + R + 4.0));
    }
    R = std::max(R + 2.0, truncation_hint);
    return Contour{{Ray{vertex, -2.0 * kPi / 3.0, R, true},
                    Ray{vertex, 2.0 * kPi / 3.0, R, false}}};
}

Contour upper_line_contour(double x, double T0, double truncation_hint) {
    double s0 = -kappa_of_T(T0) / 2.0;
    double R = std::max(line_truncation(x, s0), truncation_hint);
    return Contour{{Line{Complex(s0, -R), Complex(s0, R)}}};
}

Contour lower_undeformed_contour(double x, double kappa_inv, double truncation_hint,
                                 double vertex) {
    // rays at +-pi/3 through the vertex; cubic decay against e^{-x z} growth
    // for x < 0 and the reciprocal-gamma envelope e^{2 kappa_inv |z|}
    double R = 6.0;
    for (int it = 0; it < 4; ++it) {
        R = std::cbrt(3.0 * (kExpCut + std::abs(x) * (vertex + R / 2.0) +
                             2.0 * kappa_inv * (vertex + R) + R + 4.0));
    }
    R = std::max(R + 2.0, truncation_hint);
    return Contour{{Ray{vertex, -kPi / 3.0, R, true}, Ray{vertex, kPi / 3.0, R, false}}};
}

AiryEvalResult ai_upper_gamma(const DeformedAiryParams& p, const Config& cfg) {
    const double kT = p.kappa();
    const double k0 = kappa_of_T(cfg.T0);
    const double xt = -p.x;

    if (p.x >= 0 || std::sqrt(xt) <= k0) {
        // deformed vertical line between the poles at 0 and -kappa_T;
        // deformation across z = 0 leaves the residue kappa_T behind
        Contour c = upper_line_contour(p.x, cfg.T0);
        auto q = contour::integrate(c, upper_integrand(p.x, p.kappa_inv), cfg.abs_tol, cfg);
        ContourCase cc = p.x >= 0 ? ContourCase::upper_x_pos : ContourCase::upper_case1;
        return finish(q.value, cc, q, kT);
    }

    // rescaled wedge through +-i after z = s sqrt(xt): ray in from inf e^{-3 pi i/4}
    // to -i, right semicircular arc to +i, ray out to inf e^{3 pi i/4}
    const double sx = std::sqrt(xt);
    const double x32 = xt * sx;
    const double R = std::sqrt(kExpCut / x32) + 2.0;
    Contour c{{Ray{Complex(0, -1), -3.0 * kPi / 4.0, R, true},
               Arc{Complex(0, 0), 1.0, -kPi / 2.0, kPi / 2.0},
               Ray{Complex(0, 1), 3.0 * kPi / 4.0, R, false}}};
    const double ki = p.kappa_inv;
    Integrand g = [x32, sx, ki](Complex s) {
        return std::exp(-x32 * (s * s * s / 3.0 + s) + special::log_gamma(ki * sx * s)) * sx;
    };
    auto q = contour::integrate(c, g, cfg.abs_tol, cfg);
    ContourCase cc = (sx <= kT + 1.0) ? ContourCase::upper_case2 : ContourCase::upper_case3;
    return finish(q.value, cc, q, 0.0);
}

AiryEvalResult ai_lower_gamma(const DeformedAiryParams& p, const Config& cfg) {
    const double k0 = kappa_of_T(cfg.T0);
    const double ki = p.kappa_inv;
    const double ax = std::abs(p.x);

    if (std::sqrt(ax) <= k0) {
        // vertical line 1 + i r (1/Gamma entire: no residues anywhere)
        double R = 8.0;
        for (int it = 0; it < 3; ++it) {
            R = std::sqrt(kExpCut + ax + 2.0 * ki * (2.0 + R) + 4.0);
        }
        Contour c{{Line{Complex(1, -R), Complex(1, R)}}};
        auto q = contour::integrate(c, lower_integrand(p.x, ki), cfg.abs_tol, cfg);
        ContourCase cc =
            p.x >= 0 ? ContourCase::lower_case1_pos : ContourCase::lower_case1_neg;
        return finish(q.value, cc, q, 0.0);
    }

    const double sx = std::sqrt(ax);
    const double x32 = ax * sx;
    if (p.x > 0) {
        // steepest-descent rays through 1 at +-pi/3 after z = s sqrt(x):
        // |exp| = e^{x^{3/2}(-r^2/2 - r^3/3)} e^{-2/3 x^{3/2}} on the rays
        const double R = std::sqrt(2.0 * kExpCut / x32) + 2.0;
        Contour c{{Ray{Complex(1, 0), -kPi / 3.0, R, true},
                   Ray{Complex(1, 0), kPi / 3.0, R, false}}};
        Integrand g = [x32, sx, ki](Complex s) {
            return std::exp(x32 * (s * s * s / 3.0 - s) -
                            special::log_gamma(ki * sx * s)) *
                   sx;
        };
        auto q = contour::integrate(c, g, cfg.abs_tol, cfg);
        return finish(q.value, ContourCase::lower_case2_pos, q, 0.0);
    }

    // chevron through +-i after z = s sqrt(xt): rays at +-pi/4 plus the
    // vertical segment joining -i to i (|exp| = 1 there)
    const double R = std::sqrt((kExpCut + 2.0 * ki * sx * 3.0) / x32) + 2.0;
    Contour c{{Ray{Complex(0, -1), -kPi / 4.0, R, true},
               Line{Complex(0, -1), Complex(0, 1)},
               Ray{Complex(0, 1), kPi / 4.0, R, false}}};
    Integrand g = [x32, sx, ki](Complex s) {
        return std::exp(x32 * (s * s * s / 3.0 + s) - special::log_gamma(ki * sx * s)) * sx;
    };
    auto q = contour::integrate(c, g, cfg.abs_tol, cfg);
    return finish(q.value, ContourCase::lower_case2_neg, q, 0.0);
}

namespace {

double classical_contour_value(double x, bool derivative, const Config& cfg) {
    double R = 6.0;
    for (int it = 0; it < 4; ++it) {
        R = std::cbrt(3.0 * (kExpCut + std::abs(x) * (1.0 + R / 2.0) + R + 6.0));
    }
    R += 2.0;
    Contour c{{Ray{Complex(1, 0), -kPi / 3.0, R, true},
               Ray{Complex(1, 0), kPi / 3.0, R, false}}};
    Integrand f = [x, derivative](Complex z) {
        Complex e = std::exp(z * z * z / 3.0 - x * z);
        return derivative ? Complex(-z * e) : e;
    };
    auto q = contour::integrate(c, f, cfg.abs_tol, cfg);
    Complex v = q.value / Complex(0, kTwoPi);
    return v.real();
}

} // namespace

double airy_classical(double x, const Config& cfg) {
    if (std::abs(x) > 20.0) {
        throw std::invalid_argument("airy_classical: |x| <= 20 supported");
    }
    return classical_contour_value(x, false, cfg);
}

double airy_classical_deriv(double x, const Config& cfg) {
    if (std::abs(x) > 20.0) {
        throw std::invalid_argument("airy_classical_deriv: |x| <= 20 supported");
    }
    return classical_contour_value(x, true, cfg);
}

// ---------------------------------------------------------------------------
// TabulatedAiry

TabulatedAiry::TabulatedAiry(double T, const Config& cfg, double lo, double hi)
    : T_(T), kappa_(kappa_of_T(T)), cfg_(cfg), lo_(lo), hi_(hi), width_(2.0), npts_(25) {
    int nwin = static_cast<int>(std::ceil((hi_ - lo_) / width_));
    hi_ = lo_ + nwin * width_;
    nodes_.resize(npts_);
    bary_.resize(npts_);
    for (int j = 0; j < npts_; ++j) {
        nodes_[j] = std::cos(kPi * j / (npts_ - 1)); // Chebyshev-Lobatto on [-1,1]
        bary_[j] = (j % 2 == 0 ? 1.0 : -1.0);
    }
    bary_.front() *= 0.5;
    bary_.back() *= 0.5;

    up_.resize(nwin);
    lo_vals_.resize(nwin);
    for (int w = 0; w < nwin; ++w) {
        double a = lo_ + w * width_, b = a + width_;
        up_[w].resize(npts_);
        lo_vals_[w].resize(npts_);
        for (int j = 0; j < npts_; ++j) {
            double v = 0.5 * (a + b) + 0.5 * (b - a) * nodes_[j];
            up_[w][j] = ai_upper_gamma(DeformedAiryParams::from_T(v, T_), cfg_).value;
            lo_vals_[w][j] = ai_lower_gamma(DeformedAiryParams::from_T(v, T_), cfg_).value;
        }
        // validate on an off-node point
        double vm = 0.5 * (a + b) + 0.2345 * (b - a);
        double scale_u = 0.0, scale_l = 0.0;
        for (int j = 0; j < npts_; ++j) {
            scale_u = std::max(scale_u, std::abs(up_[w][j]));
            scale_l = std::max(scale_l, std::abs(lo_vals_[w][j]));
        }
        double eu = std::abs(eval(up_, vm) -
                             ai_upper_gamma(DeformedAiryParams::from_T(vm, T_), cfg_).value);
        double el = std::abs(eval(lo_vals_, vm) -
                             ai_lower_gamma(DeformedAiryParams::from_T(vm, T_), cfg_).value);
        build_err_ = std::max(build_err_, eu / std::max(scale_u, 1e-300));
        build_err_ = std::max(build_err_, el / std::max(scale_l, 1e-300));
    }
    if (build_err_ > 1e-8) {
        throw NumericalError("TabulatedAiry: interpolation validation failed",
                             Complex(build_err_, 0), build_err_);
    }
}

double TabulatedAiry::eval(const std::vector<std::vector<double>>& tab, double v) const {
    int w = static_cast<int>(std::floor((v - lo_) / width_));
    w = std::clamp(w, 0, static_cast<int>(tab.size()) - 1);
    double a = lo_ + w * width_, b = a + width_;
    double u = (2.0 * v - a - b) / (b - a);
    // barycentric interpolation on Chebyshev-Lobatto nodes
    double num = 0, den = 0;
    for (int j = 0; j < npts_; ++j) {
        double d = u - nodes_[j];
        if (std::abs(d) < 1e-14) return tab[w][j];
        double q = bary_[j] / d;
        num += q * tab[w][j];
        den += q;
    }
    return num / den;
}

double TabulatedAiry::upper(double v) const {
    if (v >= hi_) return kappa_; // residue constant; line contribution < 1e-12 here
    if (v < lo_) return ai_upper_gamma(DeformedAiryParams::from_T(v, T_), cfg_).value;
    return eval(up_, v);
}

double TabulatedAiry::lower(double v) const {
    if (v >= hi_) return 0.0; // |Ai_Gamma| <= C e^{-2/3 v^{3/2}} ~ e^{-181} at v = 42
    if (v < lo_) return ai_lower_gamma(DeformedAiryParams::from_T(v, T_), cfg_).value;
    return eval(lo_vals_, v);
}

} // namespace kpztail::airy
