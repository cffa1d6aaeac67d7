#include "kpztail/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "kpztail/deformed_airy.hpp"

namespace kpztail::bounds {

const char* to_string(EnvelopeKind k) {
    switch (k) {
        case EnvelopeKind::upper_all_x: return "upper_all_x";
        case EnvelopeKind::lower_pos_x: return "lower_pos_x";
        case EnvelopeKind::lower_neg_x: return "lower_neg_x";
    }
    return "?";
}

double envelope_value(EnvelopeKind which, double x, double T) {
    double T13 = std::cbrt(T);
    switch (which) {
        case EnvelopeKind::upper_all_x:
            return T13;
        case EnvelopeKind::lower_pos_x:
            if (x < 0) throw std::invalid_argument("lower_pos_x envelope needs x >= 0");
            return std::exp(-(2.0 / 3.0) * x * std::sqrt(x)) / T13;
        case EnvelopeKind::lower_neg_x:
            if (x >= 0) throw std::invalid_argument("lower_neg_x envelope needs x < 0");
            return std::exp(2.0 * std::sqrt(-x) / kappa_of_T(T)) / T13;
    }
    throw std::invalid_argument("envelope_value: bad kind");
}

EnvelopeReport certify_envelope(const EnvelopeSpec& spec, const std::vector<double>& x_grid,
                                const std::vector<double>& T_grid, const Config& cfg) {
    if (x_grid.empty() || T_grid.empty()) {
        throw std::invalid_argument("certify_envelope: empty grid");
    }
    for (double T : T_grid) {
        if (!(T >= cfg.T0)) {
            throw std::invalid_argument("certify_envelope: T grid must lie in [T0, inf)");
        }
    }
    EnvelopeReport rep;
    {
        std::ostringstream os;
        os << to_string(spec.which) << ": " << x_grid.size() << " x-points in ["
           << x_grid.front() << ", " << x_grid.back() << "], " << T_grid.size()
           << " T-points";
        rep.grid = os.str();
    }
    rep.rows.reserve(x_grid.size() * T_grid.size());
    for (double T : T_grid) {
        double tmax = 0;
        for (double x : x_grid) {
            if (spec.which == EnvelopeKind::lower_pos_x && x < 0) continue;
            if (spec.which == EnvelopeKind::lower_neg_x && x >= 0) continue;
            double value = 0;
            try {
                auto p = airy::DeformedAiryParams::from_T(x, T);
                value = (spec.which == EnvelopeKind::upper_all_x)
                            ? airy::ai_upper_gamma(p, cfg).value
                            : airy::ai_lower_gamma(p, cfg).value;
            } catch (const std::exception& e) {
                throw NumericalError("certify_envelope: evaluation failed at x=" +
                                         std::to_string(x) + " T=" + std::to_string(T) +
                                         ": " + e.what(),
                                     Complex(0, 0), 0);
            }
            double env = envelope_value(spec.which, x, T);
            double ratio = std::abs(value) / env;
            rep.rows.push_back({x, T, value, env, ratio});
            tmax = std::max(tmax, ratio);
            if (ratio > rep.empirical_C) {
                rep.empirical_C = ratio;
                rep.argmax_x = x;
                rep.argmax_T = T;
            }
        }
        rep.per_T_max.emplace_back(T, tmax);
    }

    // outermost-decade check: worst ratio on |x| in (m/2, m] vs (m/10, m/2]
    double m = 0;
    for (const auto& r : rep.rows) m = std::max(m, std::abs(r.x));
    double inner = 0, outer = 0;
    for (const auto& r : rep.rows) {
        double a = std::abs(r.x);
        if (a > m / 10.0 && a <= m / 2.0) inner = std::max(inner, r.ratio);
        if (a > m / 2.0) outer = std::max(outer, r.ratio);
    }
    rep.monotone_tail_ok = (inner == 0) || (outer <= inner * 1.05);
    return rep;
}

std::vector<double> default_x_grid(EnvelopeKind which, double x_abs_max, double step) {
    std::set<double> pts;
    if (which != EnvelopeKind::lower_neg_x) {
        for (double x = 0; x <= x_abs_max + 1e-12; x += step) pts.insert(x);
    }
    if (which != EnvelopeKind::lower_pos_x) {
        for (double x = -step; x >= -x_abs_max - 1e-12; x -= step) pts.insert(x);
        pts.insert(-x_abs_max);
    }
    // log-spaced refinement near 0
    for (double a = 1e-3; a < 1.0; a *= 2.0) {
        if (which != EnvelopeKind::lower_neg_x) pts.insert(a);
        if (which != EnvelopeKind::lower_pos_x) pts.insert(-a);
    }
    return {pts.begin(), pts.end()};
}

std::vector<double> default_T_grid() { return {1.0, 2.0, 8.0, 27.0, 64.0}; }

} // namespace kpztail::bounds
