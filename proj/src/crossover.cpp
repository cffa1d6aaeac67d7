#include "kpztail/crossover.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <thread>

#include "kpztail/fredholm.hpp"
#include "kpztail/kernel_ops.hpp"

namespace kpztail::crossover {

using contour::Arc;
using contour::Contour;
using contour::Line;

contour::Contour MuContourSpec::build() const {
    if (!(delta > 0) || !(radius > 0) || !(truncation > delta)) {
        throw std::invalid_argument("MuContourSpec: need delta, radius > 0, truncation > delta");
    }
    double rho = std::max(radius, delta);
    double x0 = std::sqrt(std::max(rho * rho - delta * delta, 0.0));
    double alpha = std::asin(delta / rho); // junction angle, in (0, pi/2]
    Contour c;
    c.segments.push_back(Line{Complex(truncation, -delta), Complex(x0, -delta)});
    // clockwise around the left of the origin: -alpha down to alpha - 2 pi
    c.segments.push_back(Arc{Complex(0, 0), rho, -alpha, alpha - kTwoPi});
    c.segments.push_back(Line{Complex(x0, delta), Complex(truncation, delta)});
    return c;
}

namespace {

constexpr double kGLx16[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542,
};
constexpr double kGLw16[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806,
};

// fixed quadrature nodes along the mu-contour: GL16 panels (width
// cfg.tail_mu_panel near the origin, 4x wider past Re = 8 where e^{-mu}
// leaves nothing to resolve) plus tail_arc_panels on the arc
struct MuNode {
    Complex mu;
    Complex weight; // GL weight * dz
};

void line_nodes(Complex a, Complex b, double width, std::vector<MuNode>& out) {
    double len = std::abs(b - a);
    if (len == 0) return;
    int panels = std::max(1, static_cast<int>(std::ceil(len / width)));
    for (int p = 0; p < panels; ++p) {
        Complex pa = a + (b - a) * (static_cast<double>(p) / panels);
        Complex pb = a + (b - a) * (static_cast<double>(p + 1) / panels);
        Complex mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
        for (int k = 0; k < 8; ++k) {
            for (double sgn : {-1.0, 1.0}) {
                out.push_back({mid + sgn * kGLx16[k] * half, kGLw16[k] * half});
            }
        }
    }
}

std::vector<MuNode> contour_nodes(const MuContourSpec& mc, const Config& cfg) {
    Contour c = mc.build();
    std::vector<MuNode> nodes;
    double near = std::min(8.0, mc.truncation);
    // panels must resolve the near-axis structure, which lives on the scale
    // of the contour's distance delta from the poles on (0, inf)
    double wnear = cfg.tail_mu_panel * std::min(1.0, 2.0 * mc.delta);
    for (const auto& seg : c.segments) {
        if (std::holds_alternative<Line>(seg)) {
            const auto& l = std::get<Line>(seg);
            // split horizontal rays at Re = near
            if (l.z0.imag() == l.z1.imag() && std::abs(l.z0.real() - l.z1.real()) > near) {
                Complex split(near, l.z0.imag());
                if (l.z0.real() > l.z1.real()) {
                    line_nodes(l.z0, split, 4.0 * cfg.tail_mu_panel, nodes);
                    line_nodes(split, l.z1, wnear, nodes);
                } else {
                    line_nodes(l.z0, split, wnear, nodes);
                    line_nodes(split, l.z1, 4.0 * cfg.tail_mu_panel, nodes);
                }
            } else {
                line_nodes(l.z0, l.z1, wnear, nodes);
            }
        } else {
            const auto& a = std::get<Arc>(seg);
            int panels = std::max(cfg.tail_arc_panels,
                                  static_cast<int>(std::ceil(cfg.tail_arc_panels * 0.5 / mc.delta)));
            for (int p = 0; p < panels; ++p) {
                double t0 = a.theta0 + (a.theta1 - a.theta0) * p / panels;
                double t1 = a.theta0 + (a.theta1 - a.theta0) * (p + 1) / panels;
                double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
                for (int k = 0; k < 8; ++k) {
                    for (double sgn : {-1.0, 1.0}) {
                        double th = mid + sgn * kGLx16[k] * half;
                        Complex z = a.center + std::polar(a.radius, th);
                        Complex dz(0, 1);
                        dz *= std::polar(a.radius, th);
                        nodes.push_back({z, kGLw16[k] * half * dz});
                    }
                }
            }
        }
    }
    return nodes;
}

// t-quadrature for the kernel's inner integral, shared across the Nystrom
// nodes: GL16 panels over the decay-envelope-justified window, twice as wide below
// t = -10 where only the smooth e^{kappa t} factor varies
struct TGrid {
    std::vector<double> t, w;
};

void t_panels(double a, double b, double width, TGrid& g) {
    if (!(b > a)) return;
    int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    for (int p = 0; p < panels; ++p) {
        double pa = a + (b - a) * p / panels;
        double pb = a + (b - a) * (p + 1) / panels;
        double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
        for (int k = 0; k < 8; ++k) {
            for (double sgn : {-1.0, 1.0}) {
                g.t.push_back(mid + sgn * kGLx16[k] * half);
                g.w.push_back(kGLw16[k] * half);
            }
        }
    }
}

TGrid t_grid(double s, double T, const Config& cfg, double delta) {
    op::KernelSpec spec{T, Complex(-1, 0), s};
    auto [lo, hi] = op::t_window(s, spec);
    TGrid g;
    double mid = std::clamp(-10.0, lo, hi);
    // near-axis mu nodes see Lorentzian features of width ~delta/kappa in t
    double kT = kappa_of_T(T);
    double wnear = std::min(cfg.tail_t_panel, 1.6 * delta / kT + 0.2);
    t_panels(lo, mid, 2.0 * cfg.tail_t_panel, g);
    t_panels(mid, hi, wnear, g);
    return g;
}

// per-resolution data reused across all mu nodes: scaled factor matrices and
// their m x m Gram products for the trace fast path
struct Level {
    int n = 0, m = 0;
    std::vector<double> A, B;   // n x m
    std::vector<double> H;      // H_kl = sum_i B_ik A_il (tr D   = sum c_k H_kk,
                                //  tr D^2 = sum c_k c_l H_kl H_lk)
    std::vector<double> PQ;     // (A^T A)_kl (B^T B)_kl for ||D||_F^2
};

Level build_level(double s, double T, const TGrid& tg, const airy::TabulatedAiry& tab,
                  int n) {
    Level lv;
    lv.n = n;
    lv.m = static_cast<int>(tg.t.size());
    const double kT = kappa_of_T(T);
    const double L = std::max(1.0, 10.0 / kT);
    auto grid = fredholm::NystromGrid::build(s, L, n);
    const int m = lv.m;
    lv.A.resize(static_cast<size_t>(n) * m);
    lv.B.resize(static_cast<size_t>(n) * m);
    for (int i = 0; i < n; ++i) {
        double sw = std::sqrt(grid.weights[i]);
        for (int k = 0; k < m; ++k) {
            double v = grid.nodes[i] + tg.t[k];
            lv.A[static_cast<size_t>(i) * m + k] = sw * tab.upper(v);
            lv.B[static_cast<size_t>(i) * m + k] = sw * tab.lower(v);
        }
    }
    lv.H.assign(static_cast<size_t>(m) * m, 0.0);
    lv.PQ.assign(static_cast<size_t>(m) * m, 0.0);
    std::vector<double> P(static_cast<size_t>(m) * m, 0.0), Q(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* Ai = &lv.A[static_cast<size_t>(i) * m];
        const double* Bi = &lv.B[static_cast<size_t>(i) * m];
        for (int k = 0; k < m; ++k) {
            double bik = Bi[k], aik = Ai[k];
            if (bik == 0 && aik == 0) continue;
            double* Hk = &lv.H[static_cast<size_t>(k) * m];
            double* Pk = &P[static_cast<size_t>(k) * m];
            double* Qk = &Q[static_cast<size_t>(k) * m];
            for (int l = 0; l < m; ++l) {
                Hk[l] += bik * Ai[l];
                Pk[l] += aik * Ai[l];
                Qk[l] += bik * Bi[l];
            }
        }
    }
    for (size_t idx = 0; idx < lv.PQ.size(); ++idx) lv.PQ[idx] = P[idx] * Q[idx];
    return lv;
}

struct TailAtN {
    Complex integral{0, 0};
    long det_evals = 0;
};

TailAtN eval_level(const Level& lv, double kT, const TGrid& tg,
                   const std::vector<MuNode>& mu_nodes) {
    const int n = lv.n, m = lv.m;
    std::vector<double> expk(m);
    for (int k = 0; k < m; ++k) expk[k] = std::exp(-kT * tg.t[k]);

    TailAtN out;
    std::vector<Complex> c(m);
    std::vector<Complex> D;
    for (const auto& node : mu_nodes) {
        for (int k = 0; k < m; ++k) {
            c[k] = tg.w[k] * node.mu / (expk[k] - node.mu);
        }
        // p1, p2, ||D||_F^2 from the Gram matrices: O(m^2), no assembly
        Complex p1{0, 0}, p2{0, 0};
        double nf2 = 0;
        for (int k = 0; k < m; ++k) {
            const double* Hk = &lv.H[static_cast<size_t>(k) * m];
            const double* PQk = &lv.PQ[static_cast<size_t>(k) * m];
            p1 += c[k] * Hk[k];
            Complex accH{0, 0};
            Complex accF{0, 0};
            for (int l = 0; l < m; ++l) {
                accH += c[l] * (Hk[l] * lv.H[static_cast<size_t>(l) * m + k]);
                accF += std::conj(c[l]) * PQk[l];
            }
            p2 += c[k] * accH;
            nf2 += (c[k] * accF).real();
        }
        double nf = std::sqrt(std::max(nf2, 0.0));
        Complex dm1 = -p1 + 0.5 * (p1 * p1 - p2);
        double tail3 = 2.0 * nf * nf * nf; // bound on the dropped e_k, k >= 3
        if (!(nf < 1e-3 && tail3 <= 1e-11 * std::abs(dm1))) {
            // assemble D and run the full route
            D.assign(static_cast<size_t>(n) * n, Complex(0, 0));
            for (int i = 0; i < n; ++i) {
                const double* Ai = &lv.A[static_cast<size_t>(i) * m];
                for (int j = 0; j < n; ++j) {
                    const double* Bj = &lv.B[static_cast<size_t>(j) * m];
                    Complex acc{0, 0};
                    for (int k = 0; k < m; ++k) acc += (Ai[k] * Bj[k]) * c[k];
                    D[static_cast<size_t>(i) * n + j] = acc;
                }
            }
            if (nf < 0.05) {
                // enough terms that nf^kmax is negligible next to the result
                double scale = std::max(std::abs(dm1), nf * nf);
                int kmax = 14;
                if (nf > 0) {
                    double need = (std::log(1e-16) + std::log(scale)) / std::log(nf);
                    kmax = std::clamp(static_cast<int>(std::ceil(need)) + 1, 3, 16);
                }
                dm1 = fredholm::trace_series_det_minus_one(D, n, kmax);
            } else {
                dm1 = fredholm::det_i_minus_d_minus_one(D, n);
            }
        }
        ++out.det_evals;
        out.integral += node.weight * std::exp(-node.mu) / node.mu * dm1;
    }
    return out;
}

} // namespace

TailResult tail_probability(double s, double T, const MuContourSpec& mc, double det_tol,
                            const Config& cfg, const airy::TabulatedAiry* tab) {
    if (!(T >= cfg.T0)) throw std::invalid_argument("tail_probability: T must be >= T0");
    std::unique_ptr<airy::TabulatedAiry> local;
    if (!tab) {
        local = std::make_unique<airy::TabulatedAiry>(T, cfg);
        tab = local.get();
    }
    auto mu_nodes = contour_nodes(mc, cfg);
    auto tg = t_grid(s, T, cfg, mc.delta);
    const double kT = kappa_of_T(T);

    TailResult res;
    Complex prev{0, 0};
    bool have_prev = false;
    for (int n = 32; n <= 256; n *= 2) {
        auto lv = build_level(s, T, tg, *tab, n);
        auto at = eval_level(lv, kT, tg, mu_nodes);
        Complex val = -at.integral / Complex(0, kTwoPi);
        res.det_evals += at.det_evals;
        res.n_used = n;
        res.tail = val.real();
        res.imag_residual = std::abs(val.imag());
        if (have_prev) {
            res.err_estimate = std::abs(val - prev);
            double tol = std::max({det_tol * 1e-5, 1e-30, 1e-6 * std::abs(val)});
            if (res.err_estimate < tol) break;
        }
        prev = val;
        have_prev = true;
    }
    if (res.imag_residual > 1e-6 * std::max(1e-12, std::abs(res.tail))) {
        throw NumericalError("tail_probability: imaginary residual too large",
                             Complex(res.tail, res.imag_residual), res.imag_residual);
    }
    double eps = 1e-9;
    if (res.tail < -eps || res.tail > 1 + eps) res.clipped = true;
    return res;
}

std::vector<SweepRow> sweep(const std::vector<double>& s_values,
                            const std::vector<double>& T_values, const MuContourSpec& mc,
                            double det_tol, const Config& cfg, int jobs) {
    struct Task {
        double s, T;
        const airy::TabulatedAiry* tab;
    };
    // one tabulated evaluator per T, shared across the T's s-points
    std::vector<std::unique_ptr<airy::TabulatedAiry>> tabs;
    std::vector<Task> tasks;
    for (double T : T_values) {
        tabs.push_back(std::make_unique<airy::TabulatedAiry>(T, cfg));
        for (double s : s_values) tasks.push_back({s, T, tabs.back().get()});
    }
    std::vector<SweepRow> rows(tasks.size());
    jobs = std::max(1, jobs);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            const Task& t = tasks[i];
            auto r = tail_probability(t.s, t.T, mc, det_tol, cfg, t.tab);
            rows[i] = {t.s, t.T, r.tail, r.err_estimate};
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

namespace {

double logsumexp2(double a, double b) {
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

struct FitObjective {
    const std::vector<SweepRow>& rows;
    // returns objective; logc1 is determined by feasibility
    double operator()(double c2, double c3, double* logc1_out = nullptr) const {
        double logc1 = -std::numeric_limits<double>::infinity();
        std::vector<double> g(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) {
            double a = -c2 * std::cbrt(rows[i].T) * rows[i].s;
            double b = -c3 * rows[i].s * std::sqrt(rows[i].s);
            g[i] = logsumexp2(a, b);
            logc1 = std::max(logc1, std::log(rows[i].tail) - g[i]);
        }
        double f = 0;
        for (size_t i = 0; i < rows.size(); ++i) {
            double r = logc1 + g[i] - std::log(rows[i].tail);
            f += r * r;
        }
        if (logc1_out) *logc1_out = logc1;
        return f;
    }
};

} // namespace

TailFit fit_tail_envelope(const std::vector<SweepRow>& samples) {
    if (samples.size() < 6) {
        throw std::invalid_argument("fit_tail_envelope: need at least 6 samples");
    }
    std::set<double> Ts, Ss;
    for (const auto& r : samples) {
        Ts.insert(r.T);
        Ss.insert(r.s);
        if (!(r.tail > 0) || !std::isfinite(r.tail)) {
            throw std::invalid_argument(
                "fit_tail_envelope: infeasible sample (tail <= 0) at s=" +
                std::to_string(r.s) + " T=" + std::to_string(r.T));
        }
    }
    if (Ts.size() < 2) {
        throw std::invalid_argument(
            "fit_tail_envelope: need >= 2 distinct T values (c2/c3 not separable)");
    }
    if (Ss.size() < 3) {
        throw std::invalid_argument("fit_tail_envelope: need >= 3 distinct s values");
    }

    FitObjective obj{samples};
    // coarse log-grid seed
    double best_f = std::numeric_limits<double>::infinity();
    double bc2 = 0.1, bc3 = 0.1;
    for (int i = 0; i <= 40; ++i) {
        for (int j = 0; j <= 40; ++j) {
            double c2 = std::exp(std::log(1e-3) + (std::log(10.0) - std::log(1e-3)) * i / 40.0);
            double c3 = std::exp(std::log(1e-3) + (std::log(10.0) - std::log(1e-3)) * j / 40.0);
            double f = obj(c2, c3);
            if (f < best_f) {
                best_f = f;
                bc2 = c2;
                bc3 = c3;
            }
        }
    }
    // Nelder-Mead refinement in (log c2, log c3)
    auto F = [&](double l2, double l3) { return obj(std::exp(l2), std::exp(l3)); };
    double p[3][2] = {{std::log(bc2), std::log(bc3)},
                      {std::log(bc2) + 0.15, std::log(bc3)},
                      {std::log(bc2), std::log(bc3) + 0.15}};
    double fv[3] = {F(p[0][0], p[0][1]), F(p[1][0], p[1][1]), F(p[2][0], p[2][1])};
    for (int it = 0; it < 400; ++it) {
        int hi = 0, lo = 0;
        for (int k = 1; k < 3; ++k) {
            if (fv[k] > fv[hi]) hi = k;
            if (fv[k] < fv[lo]) lo = k;
        }
        if (std::abs(fv[hi] - fv[lo]) < 1e-14 * (1.0 + std::abs(fv[lo]))) break;
        double cx = 0, cy = 0;
        for (int k = 0; k < 3; ++k) {
            if (k == hi) continue;
            cx += p[k][0] / 2;
            cy += p[k][1] / 2;
        }
        double rx = cx + (cx - p[hi][0]), ry = cy + (cy - p[hi][1]);
        double fr = F(rx, ry);
        if (fr < fv[lo]) {
            double ex = cx + 2 * (cx - p[hi][0]), ey = cy + 2 * (cy - p[hi][1]);
            double fe = F(ex, ey);
            if (fe < fr) {
                p[hi][0] = ex;
                p[hi][1] = ey;
                fv[hi] = fe;
            } else {
                p[hi][0] = rx;
                p[hi][1] = ry;
                fv[hi] = fr;
            }
        } else if (fr < fv[hi]) {
            p[hi][0] = rx;
            p[hi][1] = ry;
            fv[hi] = fr;
        } else {
            double kx = cx + 0.5 * (p[hi][0] - cx), ky = cy + 0.5 * (p[hi][1] - cy);
            double fk = F(kx, ky);
            if (fk < fv[hi]) {
                p[hi][0] = kx;
                p[hi][1] = ky;
                fv[hi] = fk;
            } else {
                for (int k = 0; k < 3; ++k) {
                    if (k == lo) continue;
                    p[k][0] = p[lo][0] + 0.5 * (p[k][0] - p[lo][0]);
                    p[k][1] = p[lo][1] + 0.5 * (p[k][1] - p[lo][1]);
                    fv[k] = F(p[k][0], p[k][1]);
                }
            }
        }
    }
    int lo = 0;
    for (int k = 1; k < 3; ++k) {
        if (fv[k] < fv[lo]) lo = k;
    }

    TailFit fit;
    fit.c2 = std::exp(p[lo][0]);
    fit.c3 = std::exp(p[lo][1]);
    double logc1 = 0;
    double f = obj(fit.c2, fit.c3, &logc1);
    fit.c1 = std::exp(logc1);
    fit.rms_log_residual = std::sqrt(f / samples.size());
    double worst = 0;
    for (const auto& r : samples) {
        double a = -fit.c2 * std::cbrt(r.T) * r.s;
        double b = -fit.c3 * r.s * std::sqrt(r.s);
        worst = std::max(worst, logc1 + logsumexp2(a, b) - std::log(r.tail));
    }
    fit.max_log_residual = worst;
    fit.s_min = *Ss.begin();
    fit.s_max = *Ss.rbegin();
    fit.T_min = *Ts.begin();
    fit.T_max = *Ts.rbegin();
    fit.model_slope_ratio = std::cbrt(fit.T_max) / std::cbrt(fit.T_min);

    // diagnostic: plain least-squares slope of log(tail) vs s per T
    double slope_lo = 0, slope_hi = 0;
    for (double Tsel : {fit.T_min, fit.T_max}) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (const auto& r : samples) {
            if (r.T != Tsel) continue;
            double y = std::log(r.tail);
            sx += r.s;
            sy += y;
            sxx += r.s * r.s;
            sxy += r.s * y;
            ++cnt;
        }
        double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        (Tsel == fit.T_min ? slope_lo : slope_hi) = -slope;
    }
    fit.empirical_slope_ratio = slope_lo != 0 ? slope_hi / slope_lo : 0;
    return fit;
}

} // namespace kpztail::crossover

namespace kpztail::crossover {

std::string to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "s,T,tail,err\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", r.s, r.T, r.tail,
                      r.err);
        out += buf;
    }
    return out;
}

std::vector<SweepRow> from_csv(const std::string& text) {
    std::vector<SweepRow> rows;
    size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.rfind("s,", 0) == 0) continue;
        }
        SweepRow r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &r.s, &r.T, &r.tail, &r.err) >= 3) {
            rows.push_back(r);
        } else {
            throw std::invalid_argument("from_csv: bad row: " + line);
        }
    }
    return rows;
}

} // namespace kpztail::crossover
