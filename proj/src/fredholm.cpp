#include "kpztail/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kpztail::fredholm {

NystromGrid NystromGrid::build(double s, double L, int n) {
    if (n < 2) throw std::invalid_argument("NystromGrid: n must be >= 2");
    if (!(L > 0)) throw std::invalid_argument("NystromGrid: L must be > 0");
    NystromGrid g;
    g.n = n;
    g.s = s;
    g.L = L;
    std::vector<double> u, w;
    op::gauss_legendre_nodes(n, u, w);
    g.nodes.resize(n);
    g.weights.resize(n);
    g.ref_weights = w;
    for (int i = 0; i < n; ++i) {
        g.nodes[i] = s + L * (1 + u[i]) / (1 - u[i]);
        g.weights[i] = w[i] * 2 * L / ((1 - u[i]) * (1 - u[i]));
    }
    return g;
}

std::string NystromGrid::map_description() const {
    std::ostringstream os;
    os << "x = " << s << " + " << L << "*(1+u)/(1-u), u Gauss-Legendre on (-1,1), n=" << n;
    return os.str();
}

std::vector<Complex> scaled_kernel_matrix(const NystromGrid& g, const KernelFn& K) {
    const int n = g.n;
    std::vector<double> sw(n);
    for (int i = 0; i < n; ++i) sw[i] = std::sqrt(g.weights[i]);
    std::vector<Complex> D(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            D[static_cast<size_t>(i) * n + j] = sw[i] * K(g.nodes[i], g.nodes[j]) * sw[j];
        }
    }
    return D;
}

std::vector<Complex> nystrom_matrix(const NystromGrid& g, const KernelFn& K) {
    auto D = scaled_kernel_matrix(g, K);
    const int n = g.n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            size_t idx = static_cast<size_t>(i) * n + j;
            D[idx] = (i == j ? Complex(1, 0) : Complex(0, 0)) - D[idx];
        }
    }
    return D;
}

Complex lu_det(std::vector<Complex>& m, int n) {
    Complex det{1, 0};
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(m[static_cast<size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(m[static_cast<size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return {0, 0};
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(m[static_cast<size_t>(piv) * n + j],
                          m[static_cast<size_t>(col) * n + j]);
            }
            det = -det;
        }
        Complex pivot = m[static_cast<size_t>(col) * n + col];
        det *= pivot;
        for (int r = col + 1; r < n; ++r) {
            Complex f = m[static_cast<size_t>(r) * n + col] / pivot;
            if (f == Complex(0, 0)) continue;
            m[static_cast<size_t>(r) * n + col] = f;
            for (int j = col + 1; j < n; ++j) {
                m[static_cast<size_t>(r) * n + j] -=
                    f * m[static_cast<size_t>(col) * n + j];
            }
        }
    }
    return det;
}

namespace {

double frob_norm(const std::vector<Complex>& D) {
    double s = 0;
    for (const Complex& z : D) s += std::norm(z);
    return std::sqrt(s);
}

} // namespace

// Plemelj-Smithies: det(I - D) = sum_k (-1)^k e_k with e_k built from the
// power sums p_k = tr(D^k) via Newton's identities; returns det - 1.
Complex trace_series_det_minus_one(const std::vector<Complex>& D, int n, int kmax) {
    std::vector<Complex> M(D), next(static_cast<size_t>(n) * n);
    std::vector<Complex> p;
    p.reserve(kmax);
    for (int k = 1; k <= kmax; ++k) {
        if (k > 1) {
            // next = M * D
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    Complex acc{0, 0};
                    const Complex* mi = &M[static_cast<size_t>(i) * n];
                    for (int l = 0; l < n; ++l) {
                        acc += mi[l] * D[static_cast<size_t>(l) * n + j];
                    }
                    next[static_cast<size_t>(i) * n + j] = acc;
                }
            }
            M.swap(next);
        }
        Complex tr{0, 0};
        for (int i = 0; i < n; ++i) tr += M[static_cast<size_t>(i) * n + i];
        p.push_back(tr);
    }
    std::vector<Complex> e(kmax + 1);
    e[0] = {1, 0};
    for (int k = 1; k <= kmax; ++k) {
        Complex acc{0, 0};
        for (int j = 1; j <= k; ++j) {
            acc += (j % 2 == 1 ? 1.0 : -1.0) * e[k - j] * p[j - 1];
        }
        e[k] = acc / static_cast<double>(k);
    }
    Complex out{0, 0};
    for (int k = kmax; k >= 1; --k) {
        out += (k % 2 == 1 ? -1.0 : 1.0) * e[k];
    }
    return out;
}

Complex det_i_minus_d_minus_one(const std::vector<Complex>& D, int n) {
    double nf = frob_norm(D);
    if (nf < 0.05) {
        // ||D||^k < 0.05^k: 14 terms reach ~1e-19 relative
        int kmax = std::min(14, std::max(3, n));
        return trace_series_det_minus_one(D, n, kmax);
    }
    std::vector<Complex> m(D.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            size_t idx = static_cast<size_t>(i) * n + j;
            m[idx] = (i == j ? Complex(1, 0) : Complex(0, 0)) - D[idx];
        }
    }
    // log-determinant via LU, then expm1
    Complex logdet{0, 0};
    double sign = 1;
    {
        // run the elimination tracking logs of pivots
        for (int col = 0; col < n; ++col) {
            int piv = col;
            double best = std::abs(m[static_cast<size_t>(col) * n + col]);
            for (int r = col + 1; r < n; ++r) {
                double v = std::abs(m[static_cast<size_t>(r) * n + col]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (best == 0.0) return {-1, 0}; // det exactly 0
            if (piv != col) {
                for (int j = 0; j < n; ++j) {
                    std::swap(m[static_cast<size_t>(piv) * n + j],
                              m[static_cast<size_t>(col) * n + j]);
                }
                sign = -sign;
            }
            Complex pivot = m[static_cast<size_t>(col) * n + col];
            logdet += std::log(pivot);
            for (int r = col + 1; r < n; ++r) {
                Complex f = m[static_cast<size_t>(r) * n + col] / pivot;
                if (f == Complex(0, 0)) continue;
                for (int j = col + 1; j < n; ++j) {
                    m[static_cast<size_t>(r) * n + j] -=
                        f * m[static_cast<size_t>(col) * n + j];
                }
            }
        }
    }
    if (sign < 0) logdet += Complex(0, kPi);
    return expm1_complex(logdet);
}

DetResult nystrom_det(const KernelFn& K, double s, double L, double det_tol, int n_start,
                      int n_cap) {
    if (n_start < 8) n_start = 8;
    if ((n_start & (n_start - 1)) != 0) {
        throw std::invalid_argument("nystrom_det: n_start must be a power of two");
    }
    DetResult r;
    std::vector<Complex> history;
    for (int n = n_start; n <= n_cap; n *= 2) {
        auto g = NystromGrid::build(s, L, n);
        auto m = nystrom_matrix(g, K);
        Complex det = lu_det(m, n);
        history.push_back(det);
        r.det = det;
        r.n = n;
        if (history.size() >= 2) {
            r.last_delta = std::abs(history.back() - history[history.size() - 2]);
            if (r.last_delta < det_tol) {
                r.converged = true;
            }
        }
        // geometric extrapolation from the last three iterates
        r.richardson = det;
        if (history.size() >= 3) {
            Complex d1 = history[history.size() - 2] - history[history.size() - 3];
            Complex d2 = history.back() - history[history.size() - 2];
            if (std::abs(d1) > 0) {
                Complex q = d2 / d1;
                if (std::abs(q) < 0.9) r.richardson = det + d2 * q / (1.0 - q);
            }
        }
        if (r.converged) break;
    }
    return r;
}

DetResult nystrom_det(const op::KernelSpec& spec, int n_start, const Config& cfg,
                      const airy::TabulatedAiry* tab) {
    spec.validate(cfg);
    std::unique_ptr<airy::TabulatedAiry> local;
    if (!tab) {
        local = std::make_unique<airy::TabulatedAiry>(spec.T, cfg);
        tab = local.get();
    }
    double L = std::max(1.0, 10.0 / spec.kappa());
    KernelFn K = [&spec, &cfg, tab](double x, double y) {
        return op::kernel_eval(x, y, spec, cfg, tab);
    };
    return nystrom_det(K, spec.s, L, cfg.det_tol, n_start, cfg.det_node_cap);
}

DetBoundReport det_bound_check(const op::KernelSpec& spec, const Config& cfg,
                               const airy::TabulatedAiry* tab) {
    spec.validate(cfg);
    std::unique_ptr<airy::TabulatedAiry> local;
    if (!tab) {
        local = std::make_unique<airy::TabulatedAiry>(spec.T, cfg);
        tab = local.get();
    }
    DetBoundReport rep;
    auto hs = op::hs_norms(spec, cfg, tab);
    rep.norm_a1 = hs.norm_a1;
    rep.norm_a2 = hs.norm_a2;
    double p = hs.product;
    rep.rhs = p * std::exp(p + 1.0);

    auto det = nystrom_det(spec, 16, cfg, tab);
    rep.det = det.det;
    if (!det.converged) {
        throw NumericalError("det_bound_check: determinant did not converge", det.det,
                             det.last_delta);
    }
    // cancellation-free |det - 1| at the converged node count
    double L = std::max(1.0, 10.0 / spec.kappa());
    auto g = NystromGrid::build(spec.s, L, det.n);
    auto D = scaled_kernel_matrix(g, [&](double x, double y) {
        return op::kernel_eval(x, y, spec, cfg, tab);
    });
    rep.lhs = std::abs(det_i_minus_d_minus_one(D, det.n));
    rep.numerical_error = det.last_delta + hs.err_estimate * p;
    rep.ok = rep.lhs <= rep.rhs + rep.numerical_error;
    rep.slack_ratio = rep.lhs > 0 ? rep.rhs / rep.lhs
                                  : std::numeric_limits<double>::infinity();
    return rep;
}

} // namespace kpztail::fredholm
