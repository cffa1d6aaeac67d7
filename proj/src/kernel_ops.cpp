#include "kpztail/kernel_ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace kpztail::op {

namespace {

constexpr double kTailExp = 55.0;

// 16-point Gauss-Legendre rule on [-1, 1] (same rule as the contour module).
constexpr double kGLx[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542,
};
constexpr double kGLw[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806,
};

// composite GL16 with panel width <= w over [a, b]
template <typename F>
double panel_quad(const F& f, double a, double b, double w) {
    if (!(b > a)) return 0.0;
    int panels = std::max(1, static_cast<int>(std::ceil((b - a) / w)));
    double acc = 0;
    for (int j = 0; j < panels; ++j) {
        double pa = a + (b - a) * j / panels;
        double pb = a + (b - a) * (j + 1) / panels;
        double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
        double s = 0;
        for (int k = 0; k < 8; ++k) {
            s += kGLw[k] * (f(mid + half * kGLx[k]) + f(mid - half * kGLx[k]));
        }
        acc += s * half;
    }
    return acc;
}

double quartic_tail(double R) {
    // Int_R^inf dt/(t^4+1) = R^-3/3 - R^-7/7 + R^-11/11 - ...
    double r4 = 1.0 / (R * R * R * R), rp = 1.0 / (R * R * R);
    double acc = 0, sign = 1;
    for (int k = 0; k < 6; ++k) {
        acc += sign * rp / (4 * k + 3);
        rp *= r4;
        sign = -sign;
    }
    return acc;
}

struct AiryEval {
    const airy::TabulatedAiry* tab;
    double T;
    const Config* cfg;
    double up(double v) const {
        if (tab) return tab->upper(v);
        return airy::ai_upper_gamma(airy::DeformedAiryParams::from_T(v, T), *cfg).value;
    }
    double lo(double v) const {
        if (tab) return tab->lower(v);
        return airy::ai_lower_gamma(airy::DeformedAiryParams::from_T(v, T), *cfg).value;
    }
};

} // namespace

// mapped Gauss-Legendre nodes for integrals over (s, inf): x = s + L(1+u)/(1-u)
void gauss_legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double u = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0, p1 = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1;
            p1 = u;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * u * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (u * p1 - p0) / (u * u - 1);
            double du = p1 / pp;
            u -= du;
            if (std::abs(du) < 1e-15) break;
        }
        // nodes ordered ascending; symmetric pair
        x[i] = -std::abs(u);
        x[n - 1 - i] = std::abs(u);
        w[i] = w[n - 1 - i] = 2.0 / ((1 - u * u) * pp * pp);
    }
}

void KernelSpec::validate(const Config& cfg) const {
    if (!(T >= cfg.T0)) throw std::invalid_argument("KernelSpec: T must be >= T0");
    if (mu.imag() == 0 && mu.real() > 0) {
        throw std::invalid_argument("KernelSpec: mu must avoid the positive real axis");
    }
    if (!is_finite(mu)) throw std::invalid_argument("KernelSpec: mu must be finite");
}

bool KernelSpec::largeness_ok(double T0) const {
    double k0 = kappa_of_T(T0);
    return s > 64.0 / (k0 * k0 * k0 * k0);
}

Complex mu_factor(double t, const KernelSpec& spec) {
    double e = std::exp(-spec.kappa() * t);
    Complex denom = e - spec.mu;
    if (std::abs(denom) < 1e-12) {
        throw std::domain_error("mu_factor: denominator within 1e-12 of zero at t=" +
                                std::to_string(t));
    }
    if (std::isinf(e)) return {0, 0};
    return spec.mu / denom;
}

MuEnvelopeReport mu_factor_envelope_scan(const KernelSpec& spec,
                                         const std::vector<double>& t_grid,
                                         double exponent_scale) {
    MuEnvelopeReport rep;
    rep.exponent_scale = exponent_scale;
    double k = spec.kappa(), amu = std::abs(spec.mu);
    for (double t : t_grid) {
        double env = amu * std::min(std::exp(exponent_scale * k * t), 1.0);
        double ratio = std::abs(mu_factor(t, spec)) / env;
        if (!std::isfinite(ratio)) {
            ++rep.violations;
            continue;
        }
        if (ratio > rep.C_hat) {
            rep.C_hat = ratio;
            rep.argmax_t = t;
        }
    }
    return rep;
}

std::pair<double, double> t_window(double y_min, const KernelSpec& spec) {
    double k = spec.kappa(), ki = 1.0 / k;
    double a = kTailExp / k;
    for (int it = 0; it < 4; ++it) {
        a = (kTailExp + 2.0 * ki * std::sqrt(a + std::abs(y_min) + 1.0)) / k;
    }
    double t_lo = -a - 2.0;
    double t_hi = std::max(t_lo + 2.0, 21.0 - y_min);
    return {t_lo, t_hi};
}

Complex kernel_eval(double x, double y, const KernelSpec& spec, const Config& cfg,
                    const airy::TabulatedAiry* tab) {
    spec.validate(cfg);
    if (x < spec.s || y < spec.s) {
        throw std::invalid_argument("kernel_eval: x, y must be >= s");
    }
    AiryEval ae{tab, spec.T, &cfg};
    auto [t_lo, t_hi] = t_window(std::min(x, y), spec);
    contour::Integrand f = [&](Complex z) {
        double t = z.real();
        return mu_factor(t, spec) * ae.up(x + t) * ae.lo(y + t);
    };
    contour::Contour c{{contour::Line{Complex(t_lo, 0), Complex(t_hi, 0)}}};
    auto q = contour::integrate(c, f, cfg.abs_tol, cfg);
    return q.value;
}

double a1_kernel(double x, double t, const KernelSpec& spec, const Config& cfg,
                 const airy::TabulatedAiry* tab) {
    AiryEval ae{tab, spec.T, &cfg};
    return ae.up(x + t) / std::sqrt((x * x * x * x + 1) * (t * t * t * t + 1));
}

Complex a2_kernel(double t, double y, const KernelSpec& spec, const Config& cfg,
                  const airy::TabulatedAiry* tab) {
    AiryEval ae{tab, spec.T, &cfg};
    return mu_factor(t, spec) * ae.lo(y + t) *
           std::sqrt((y * y * y * y + 1) * (t * t * t * t + 1));
}

HSReport hs_norms(const KernelSpec& spec, const Config& cfg,
                  const airy::TabulatedAiry* tab) {
    spec.validate(cfg);
    std::unique_ptr<airy::TabulatedAiry> local;
    if (!tab) {
        local = std::make_unique<airy::TabulatedAiry>(spec.T, cfg);
        tab = local.get();
    }
    AiryEval ae{tab, spec.T, &cfg};
    const double k = spec.kappa(), ki = 1.0 / k;
    const double s = spec.s;
    const double Rcore = 50.0;
    const double Jtail = quartic_tail(Rcore);

    auto a1_inner = [&](double x) {
        double core = panel_quad(
            [&](double t) {
                double u = ae.up(x + t);
                return u * u / ((x * x * x * x + 1) * (t * t * t * t + 1));
            },
            -Rcore, Rcore, 2.0);
        // right tail: Ai^Gamma saturates to kappa for arguments past the table
        return core + k * k * Jtail / (x * x * x * x + 1);
    };

    auto a2_inner = [&](double y) {
        double a = 120.0 / (2 * k);
        for (int it = 0; it < 4; ++it) {
            a = (120.0 + 4.0 * ki * std::sqrt(a + 1.0) + 8.0 * std::log1p(a)) / (2 * k);
        }
        double lo = -a - 2.0, hi = std::max(lo + 2.0, 25.0 - y);
        return panel_quad(
            [&](double t) {
                double w = ae.lo(y + t);
                double mf = std::norm(mu_factor(t, spec));
                return mf * w * w * (y * y * y * y + 1) * (t * t * t * t + 1);
            },
            lo, hi, 1.0);
    };

    // I1/I3/I4 share the integrand (e^{2kt} ^ 1) e^{-4/3|x+t|^{3/2}} (x^4+1)(t^4+1);
    // the |x+t|^{3/2} kink at t = -x is smoothed by t = -x + v^2.
    auto Ienv = [&](double x, double t) {
        return std::min(std::exp(2 * k * t), 1.0) *
               std::exp(-(4.0 / 3.0) * std::pow(std::abs(x + t), 1.5)) *
               (x * x * x * x + 1) * (t * t * t * t + 1);
    };
    auto I_range = [&](double x, double tlo, double thi) {
        double cut = -x + 26.0;
        thi = std::min(thi, cut);
        if (!(thi > tlo)) return 0.0;
        double acc = 0;
        double smooth_from = tlo;
        if (tlo == -x) {
            double vhi = std::sqrt(std::min(1.0, thi + x));
            acc += panel_quad([&](double v) { return Ienv(x, -x + v * v) * 2 * v; }, 0.0,
                              vhi, 0.125);
            smooth_from = -x + vhi * vhi;
        }
        acc += panel_quad([&](double t) { return Ienv(x, t); }, smooth_from, thi, 0.5);
        return acc;
    };
    auto I2_inner = [&](double x) {
        // tau = -t - x >= 0; the sqrt(tau) kink is smoothed the same way
        auto g = [&](double tau) {
            double t = -x - tau;
            return std::exp(-2 * k * (x + tau)) * tau * std::exp(2 * ki * std::sqrt(tau)) *
                   (x * x * x * x + 1) * (t * t * t * t + 1);
        };
        double a = 120.0 / (2 * k);
        for (int it = 0; it < 4; ++it) {
            a = (120.0 + 2.0 * ki * std::sqrt(a) + 8.0 * std::log1p(x + a)) / (2 * k);
        }
        double acc = panel_quad([&](double v) { return g(v * v) * 2 * v; }, 0.0, 1.0, 0.125);
        acc += panel_quad(g, 1.0, std::max(2.0, a), 0.5);
        return acc;
    };

    HSReport rep;
    rep.largeness_ok = spec.largeness_ok(cfg.T0);
    double L = std::max(1.0, 10.0 / k);
    double prev_a1 = 0, prev_a2 = 0;
    std::vector<double> gx, gw;
    for (int n = 48;; n *= 2) {
        gauss_legendre_nodes(n, gx, gw);
        double sa1 = 0, sa2 = 0, i1 = 0, i2 = 0, i3 = 0, i4 = 0;
        for (int i = 0; i < n; ++i) {
            double u = gx[i];
            double x = s + L * (1 + u) / (1 - u);
            double w = gw[i] * 2 * L / ((1 - u) * (1 - u));
            sa1 += w * a1_inner(x);
            sa2 += w * a2_inner(x);
            i1 += w * I_range(x, -x, 1e100);
            i3 += w * I_range(x, -x, -x / 2);
            i4 += w * I_range(x, -x / 2, 1e100);
            i2 += w * I2_inner(x);
        }
        double drift = std::abs(sa1 - prev_a1) / std::max(sa1, 1e-300) +
                       std::abs(sa2 - prev_a2) / std::max(sa2, 1e-300);
        rep.norm_a1 = std::sqrt(sa1);
        rep.norm_a2 = std::sqrt(sa2);
        rep.I1 = i1;
        rep.I2 = i2;
        rep.I3 = i3;
        rep.I4 = i4;
        rep.err_estimate = drift;
        if (n >= 96 && drift < 1e-7) break;
        if (n >= 384) break;
        prev_a1 = sa1;
        prev_a2 = sa2;
    }
    rep.product = rep.norm_a1 * rep.norm_a2;
    return rep;
}

} // namespace kpztail::op
