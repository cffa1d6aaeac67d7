// Acceptance suite: one pass/fail line per criterion, fixed tolerances.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "kpztail/bounds.hpp"
#include "kpztail/crossover.hpp"
#include "kpztail/deformed_airy.hpp"
#include "kpztail/fredholm.hpp"
#include "kpztail/kernel_ops.hpp"
#include "kpztail/special.hpp"
#include "oracles.hpp"

using namespace kpztail;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

struct Criterion {
    const char* name;
    Clock::time_point start = Clock::now();
    bool ok = true;
    std::string detail;

    explicit Criterion(const char* n) : name(n) {}
    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        } else if (!cond) {
            detail += "; " + what;
        }
    }
    void finish() {
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        std::printf("[%s] %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", name, secs,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++g_failures;
    }
};

std::string fmt(double v) {
    char b[64];
    std::snprintf(b, sizeof(b), "%.6g", v);
    return b;
}

const Config kCfg{};

const airy::TabulatedAiry& tab(double T) {
    static airy::TabulatedAiry t8(8.0, kCfg);
    static airy::TabulatedAiry t64(64.0, kCfg);
    if (T == 8.0) return t8;
    if (T == 64.0) return t64;
    throw std::logic_error("tab: only T = 8, 64 cached");
}

// ----- criterion 1: machinery validation -----
void criterion1() {
    Criterion c("criterion 1: airy_classical vs Maclaurin oracle (<= 1e-8; Ai(0) 1e-9)");
    for (double x : {-5.0, -2.0, 0.0, 1.0, 5.0, 10.0}) {
        double v = airy::airy_classical(x, kCfg);
        double ref = oracle::airy_ai(x);
        c.require(std::abs(v - ref) <= 1e-8,
                  "x=" + fmt(x) + " diff=" + fmt(std::abs(v - ref)));
    }
    double ai0 = airy::airy_classical(0.0, kCfg);
    c.require(std::abs(ai0 - 0.3550280539) <= 1e-9,
              "Ai(0)=" + fmt(ai0) + " vs 0.3550280539");
    c.finish();
}

// ----- criterion 2: residue/deformation consistency -----
void criterion2() {
    Criterion c("criterion 2: deform_check undeformed vs deformed Ai^Gamma (<= 1e-7)");
    for (double T : {1.0, 2.0, 8.0}) {
        for (double x : {-3.0, 0.0, 3.0}) {
            auto p = airy::DeformedAiryParams::from_T(x, T);
            auto f = airy::upper_integrand(x, p.kappa_inv);
            auto undeformed = airy::upper_undeformed_contour(x);
            double resid = 0;
            if (x >= 0 || std::sqrt(-x) <= kappa_of_T(kCfg.T0)) {
                // deformed line between the poles: the deformation crosses z = 0
                auto line = airy::upper_line_contour(x, kCfg.T0);
                resid = contour::deform_check(undeformed, line, f,
                                              {Complex(airy::upper_residue_at_zero(p.kappa_inv), 0)},
                                              1e-9, kCfg);
            } else {
                // rescaled wedge in the z-plane: no poles crossed
                double sx = std::sqrt(-x);
                double R = (std::sqrt(52.0 / std::pow(-x, 1.5)) + 2.0) * sx;
                contour::Contour wedge{{contour::Ray{Complex(0, -sx), -3 * kPi / 4, R, true},
                                        contour::Arc{{0, 0}, sx, -kPi / 2, kPi / 2},
                                        contour::Ray{Complex(0, sx), 3 * kPi / 4, R, false}}};
                resid = contour::deform_check(undeformed, wedge, f, {}, 1e-9, kCfg);
            }
            c.require(resid <= 1e-7,
                      "T=" + fmt(T) + " x=" + fmt(x) + " residual=" + fmt(resid));
        }
    }
    c.finish();
}

// ----- criterion 3: deformed-Airy envelope certification -----
void criterion3() {
    Criterion c("criterion 3: envelope certification, refinement-stable (< 5%)");
    std::vector<double> Ts{1.0, 8.0, 64.0};
    for (auto kind : {bounds::EnvelopeKind::upper_all_x, bounds::EnvelopeKind::lower_pos_x,
                      bounds::EnvelopeKind::lower_neg_x}) {
        auto coarse = bounds::certify_envelope(
            {kind}, bounds::default_x_grid(kind, 20.0, 0.5), Ts, kCfg);
        auto fine = bounds::certify_envelope(
            {kind}, bounds::default_x_grid(kind, 20.0, 0.25), Ts, kCfg);
        double drift = std::abs(fine.empirical_C - coarse.empirical_C) / coarse.empirical_C;
        c.require(std::isfinite(coarse.empirical_C) && coarse.empirical_C > 0,
                  std::string(bounds::to_string(kind)) + ": C not finite");
        c.require(drift < 0.05, std::string(bounds::to_string(kind)) +
                                    ": refinement drift " + fmt(drift));
        c.require(fine.monotone_tail_ok,
                  std::string(bounds::to_string(kind)) + ": tail ratio grows outward");
    }
    c.finish();
}

// ----- criterion 4: Stirling sandwich and reciprocal-gamma envelope -----
void criterion4() {
    Criterion c("criterion 4: Stirling sandwich (1000 pts) and 1/Gamma envelope scan");
    auto worst = special::check_stirling_sandwich_range(1e-3, 1e3, 1000);
    c.require(worst.ok, "sandwich violated at x=" + fmt(worst.x));
    auto env = special::check_recip_gamma_envelope({0.1, 10.0, -10.0, 10.0}, 0.1);
    c.require(env.violations == 0, "envelope violations=" + fmt(double(env.violations)));
    c.require(std::isfinite(env.max_ratio) && env.max_ratio > 0, "max_ratio not finite");
    c.finish();
}

// ----- criterion 5: Fredholm engine -----
void criterion5() {
    Criterion c("criterion 5: Fredholm engine (zero, rank-one, doubling, Airy kernel)");
    {
        auto g = fredholm::NystromGrid::build(0.0, 1.0, 64);
        auto m = fredholm::nystrom_matrix(g, [](double, double) { return Complex(0, 0); });
        c.require(fredholm::lu_det(m, 64) == Complex(1, 0), "zero-kernel det != 1");
    }
    {
        auto grid = fredholm::NystromGrid::build(0.0, 1.0, 64);
        auto f = [](double x) { return std::exp(-1.3 * x); };
        auto g2 = [](double y) { return std::exp(-0.7 * y) * (1 + y); };
        auto m = fredholm::nystrom_matrix(
            grid, [&](double x, double y) { return Complex(f(x) * g2(y), 0); });
        Complex det = fredholm::lu_det(m, grid.n);
        double inner = 0;
        for (int i = 0; i < grid.n; ++i) {
            inner += grid.weights[i] * f(grid.nodes[i]) * g2(grid.nodes[i]);
        }
        c.require(std::abs(det - Complex(1.0 - inner, 0)) <= 1e-8,
                  "rank-one identity diff=" + fmt(std::abs(det - Complex(1.0 - inner, 0))));
    }
    auto K_engine = [](double x, double y) -> Complex {
        if (x > 12.0 || y > 12.0) return {0, 0};
        double ax = airy::airy_classical(x, kCfg), ay = airy::airy_classical(y, kCfg);
        double px = airy::airy_classical_deriv(x, kCfg), py = airy::airy_classical_deriv(y, kCfg);
        if (x == y) return {px * px - x * ax * ax, 0};
        return {(ax * py - px * ay) / (x - y), 0};
    };
    auto K_oracle = [](double x, double y) -> Complex {
        if (x > 12.0 || y > 12.0) return {0, 0};
        auto rx = oracle::airy_series(x), ry = oracle::airy_series(y);
        if (x == y) return {rx.aip * rx.aip - x * rx.ai * rx.ai, 0};
        return {(rx.ai * ry.aip - rx.aip * ry.ai) / (x - y), 0};
    };
    {
        std::vector<double> deltas;
        Complex prev{0, 0};
        for (int n : {16, 32, 64}) {
            auto g = fredholm::NystromGrid::build(0.0, 2.0, n);
            auto m = fredholm::nystrom_matrix(g, K_oracle);
            Complex det = fredholm::lu_det(m, n);
            if (n > 16) deltas.push_back(std::abs(det - prev));
            prev = det;
        }
        c.require(deltas[0] / std::max(deltas[1], 1e-18) >= 4.0,
                  "doubling factor " + fmt(deltas[0] / deltas[1]));
    }
    auto engine = fredholm::nystrom_det(K_engine, 0.0, 2.0, kCfg.det_tol, 16, 512);
    c.require(engine.converged, "engine det did not converge");
    // independent oracle: series-Airy kernel at 4x the engine's node count,
    // with geometric (Richardson) extrapolation across its doubling history
    auto oracle_run = fredholm::nystrom_det(K_oracle, 0.0, 2.0, 1e-13, 16,
                                            std::max(4 * engine.n, 64));
    c.require(std::abs(engine.det - oracle_run.richardson) <= 1e-6,
              "engine vs oracle diff=" + fmt(std::abs(engine.det - oracle_run.richardson)));
    c.require(std::abs(engine.det.real() - 0.9693728283552) <= 1e-6,
              "F2(0)=" + fmt(engine.det.real()));
    c.finish();
}

// ----- criterion 6: determinant inequality -----
void criterion6() {
    Criterion c("criterion 6: |det-1| <= ||A1|| ||A2|| e^{||A1|| ||A2||+1} on the matrix");
    for (double T : {8.0, 64.0}) {
        for (double s : {10.0, 14.0, 18.0}) {
            for (Complex mu : {Complex(-1, 0), Complex(-1, 1), Complex(-1, -1)}) {
                op::KernelSpec spec{T, mu, s};
                auto rep = fredholm::det_bound_check(spec, kCfg, &tab(T));
                c.require(rep.ok, "T=" + fmt(T) + " s=" + fmt(s) + " mu=(" +
                                      fmt(mu.real()) + "," + fmt(mu.imag()) +
                                      ") lhs=" + fmt(rep.lhs) + " rhs=" + fmt(rep.rhs));
            }
        }
    }
    c.finish();
}

// ----- criterion 7: HS-norm shape checks -----
void criterion7() {
    Criterion c("criterion 7: I1 = I3+I4; log ||A2||^2 decreasing with the mixed shape");
    for (double T : {8.0, 64.0}) {
        double prev = std::numeric_limits<double>::infinity();
        std::vector<std::pair<double, double>> pts; // (s, log ||A2||^2)
        for (double s = 10.0; s <= 20.0; s += 2.0) {
            op::KernelSpec spec{T, Complex(-1, 0), s};
            auto hs = op::hs_norms(spec, kCfg, &tab(T));
            c.require(std::abs(hs.I1 - (hs.I3 + hs.I4)) <= 1e-6 * hs.I1,
                      "T=" + fmt(T) + " s=" + fmt(s) + " I1-(I3+I4) rel=" +
                          fmt(std::abs(hs.I1 - hs.I3 - hs.I4) / hs.I1));
            double l2 = 2.0 * std::log(hs.norm_a2);
            c.require(l2 < prev, "T=" + fmt(T) + " s=" + fmt(s) + ": ||A2|| not decreasing");
            prev = l2;
            pts.emplace_back(s, l2);
        }
        // constrained upper-envelope fit of C s^9 (e^{-kappa s} + e^{-c s^{3/2}}):
        // pick the best c-hat, check feasibility, and require the data to
        // decay at least as fast as the fitted envelope's slope
        double kT = kappa_of_T(T);
        double best_rms = std::numeric_limits<double>::infinity();
        double best_ch = 0, best_logC = 0;
        auto env_log = [&](double ch, double s) {
            double a = -kT * s, b = -ch * s * std::sqrt(s);
            double m = std::max(a, b);
            return 9.0 * std::log(s) + m + std::log1p(std::exp(std::min(a, b) - m));
        };
        for (double ch = 0.05; ch <= 2.0; ch += 0.005) {
            double logC = -std::numeric_limits<double>::infinity();
            for (auto [s, l2] : pts) logC = std::max(logC, l2 - env_log(ch, s));
            double f = 0;
            for (auto [s, l2] : pts) {
                double r = logC + env_log(ch, s) - l2;
                f += r * r;
            }
            double rms = std::sqrt(f / pts.size());
            if (rms < best_rms) {
                best_rms = rms;
                best_ch = ch;
                best_logC = logC;
            }
        }
        c.require(std::isfinite(best_logC), "T=" + fmt(T) + " envelope fit infeasible");
        for (auto [s, l2] : pts) {
            c.require(best_logC + env_log(best_ch, s) >= l2 - 1e-9,
                      "T=" + fmt(T) + " envelope below data at s=" + fmt(s));
        }
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            double smid = 0.5 * (pts[i].first + pts[i + 1].first);
            double slope = (pts[i + 1].second - pts[i].second) /
                           (pts[i + 1].first - pts[i].first);
            double env_slope =
                9.0 / smid - std::min(kT, 1.5 * best_ch * std::sqrt(smid));
            c.require(slope <= env_slope + 0.1,
                      "T=" + fmt(T) + " s~" + fmt(smid) + " slope " + fmt(slope) +
                          " vs envelope slope " + fmt(env_slope));
        }
        std::printf("    [info] T=%g: c_hat=%.3f rms_log_slack=%.3f\n", T, best_ch,
                    best_rms);
    }
    c.finish();
}

// ----- criterion 8: tail sweep and upper-envelope certification -----
void criterion8() {
    Criterion c("criterion 8: tail sweep monotone/real; feasible envelope; c2-slope ratio");
    crossover::MuContourSpec mc;
    std::vector<double> ss;
    for (double s = 8; s <= 20; s += 1.0) ss.push_back(s);
    std::vector<crossover::SweepRow> rows;
    for (double T : {8.0, 64.0}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double s : ss) {
            auto r = crossover::tail_probability(s, T, mc, kCfg.det_tol, kCfg, &tab(T));
            c.require(r.tail > 0, "T=" + fmt(T) + " s=" + fmt(s) + ": tail <= 0");
            c.require(r.imag_residual <= 1e-6 * std::max(1e-12, std::abs(r.tail)),
                      "T=" + fmt(T) + " s=" + fmt(s) + ": imag residual " +
                          fmt(r.imag_residual));
            c.require(r.tail <= prev,
                      "T=" + fmt(T) + " s=" + fmt(s) + ": tail increased");
            prev = r.tail;
            rows.push_back({s, T, r.tail, r.err_estimate});
        }
    }
    auto fit = crossover::fit_tail_envelope(rows);
    c.require(fit.c1 > 0 && fit.c2 > 0 && fit.c3 > 0, "fit not feasible");
    c.require(fit.max_log_residual >= -1e-12, "envelope fails to dominate");
    // the fitted model's T-term slope is c2 T^{1/3}: the T = 64 over T = 8
    // ratio must be (64/8)^{1/3} = 2 within 30%
    c.require(std::abs(fit.model_slope_ratio - 2.0) <= 0.6,
              "model slope ratio " + fmt(fit.model_slope_ratio));
    std::printf("    [info] fit: c1=%.4g c2=%.4g c3=%.4g rms_slack=%.3g max_slack=%.3g "
                "model_slope_ratio=%.3f empirical_slope_ratio=%.3f\n",
                fit.c1, fit.c2, fit.c3, fit.rms_log_residual, fit.max_log_residual,
                fit.model_slope_ratio, fit.empirical_slope_ratio);
    c.finish();
}

// ----- criterion 9: determinism -----
void criterion9() {
    Criterion c("criterion 9: identical sweep invocations give byte-identical CSV");
    crossover::MuContourSpec mc;
    auto r1 = crossover::sweep({10.0, 12.0}, {8.0}, mc, kCfg.det_tol, kCfg, 1);
    auto r2 = crossover::sweep({10.0, 12.0}, {8.0}, mc, kCfg.det_tol, kCfg, 1);
    c.require(crossover::to_csv(r1) == crossover::to_csv(r2), "CSV bytes differ");
    c.finish();
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("%d criterion failure(s)\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
