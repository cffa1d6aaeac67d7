#pragma once

#include <vector>

#include "kpztail/common.hpp"
#include "kpztail/contour.hpp"
#include "kpztail/deformed_airy.hpp"

namespace kpztail::crossover {

/// The mu-contour C~: two horizontal rays Im = +-delta from Re = truncation
/// joined by a left arc of the given radius around 0 (avoiding the kernel's
/// poles on (0, inf)). Oriented from truncation - i delta, around the left
/// of 0, to truncation + i delta; with the -(2 pi i)^{-1} normalization this
/// makes validated tails nonnegative.
struct MuContourSpec {
    double delta = 0.5;
    double radius = 0.5;
    double truncation = 40.0;

    contour::Contour build() const;
};

struct TailResult {
    double tail = 0;
    double imag_residual = 0;
    double err_estimate = 0;
    int n_used = 0;
    long det_evals = 0;
    bool clipped = false;  // true when the raw value fell outside [-eps, 1+eps]
};

/// 1 - F^edge_{T,0}(s) = -(2 pi i)^{-1} Int_{C~} e^{-mu} dmu/mu [det(I - K~_{T,mu}) - 1],
/// evaluated by Nystrom determinants at the contour's quadrature nodes with
/// node doubling until the tail stabilizes.
TailResult tail_probability(double s, double T, const MuContourSpec& mc, double det_tol,
                            const Config& cfg = default_config(),
                            const airy::TabulatedAiry* tab = nullptr);

struct SweepRow {
    double s = 0, T = 0, tail = 0, err = 0;
};

/// Row-major sweep over (T, s); deterministic ordering independent of jobs.
std::vector<SweepRow> sweep(const std::vector<double>& s_values,
                            const std::vector<double>& T_values, const MuContourSpec& mc,
                            double det_tol, const Config& cfg = default_config(),
                            int jobs = 1);

struct TailFit {
    double c1 = 0, c2 = 0, c3 = 0;
    double rms_log_residual = 0;  // rms slack of the upper envelope (>= 0)
    double max_log_residual = 0;
    double s_min = 0, s_max = 0;
    double T_min = 0, T_max = 0;
    /// slope of the fitted T-term at T_max over T_min: c2 T_max^{1/3} / (c2 T_min^{1/3})
    double model_slope_ratio = 0;
    /// ratio of per-T least-squares log-tail slopes (diagnostic)
    double empirical_slope_ratio = 0;
};

/// Constrained least squares of log(tail) <= log c1 + log(e^{-c2 T^{1/3} s}
/// + e^{-c3 s^{3/2}}) with every residual >= 0 (a certified upper envelope).
/// Requires >= 6 samples spanning >= 2 distinct T and >= 3 distinct s.
TailFit fit_tail_envelope(const std::vector<SweepRow>& samples);

/// CSV with header "s,T,tail,err", 17 significant digits.
std::string to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> from_csv(const std::string& text);

} // namespace kpztail::crossover
