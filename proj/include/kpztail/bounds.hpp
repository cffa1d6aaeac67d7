#pragma once

#include <string>
#include <vector>

#include "kpztail/common.hpp"

namespace kpztail::bounds {

enum class EnvelopeKind {
    upper_all_x,  // |Ai^Gamma(x)| <= C T^{1/3},                 x in R
    lower_pos_x,  // |Ai_Gamma(x)| <= C T^{-1/3} e^{-2/3 x^{3/2}}, x >= 0
    lower_neg_x,  // |Ai_Gamma(x)| <= C T^{-1/3} e^{2 kappa^{-1} |x|^{1/2}}, x < 0
};

const char* to_string(EnvelopeKind k);

struct EnvelopeSpec {
    EnvelopeKind which = EnvelopeKind::upper_all_x;
};

double envelope_value(EnvelopeKind which, double x, double T);

struct EnvelopeRow {
    double x, T, value, envelope, ratio;
};

struct EnvelopeReport {
    double empirical_C = 0;
    double argmax_x = 0, argmax_T = 0;
    std::string grid;
    bool monotone_tail_ok = false;
    std::vector<std::pair<double, double>> per_T_max; // (T, max ratio)
    std::vector<EnvelopeRow> rows;
};

/// Scans |value| / envelope over the grid. empirical_C is the max ratio with
/// lexicographic (x, T) tie-breaking. monotone_tail_ok is true when the
/// worst-case ratio over the outermost decade of |x| does not grow outward
/// (the bound does not deteriorate in the tail).
EnvelopeReport certify_envelope(const EnvelopeSpec& spec, const std::vector<double>& x_grid,
                                const std::vector<double>& T_grid,
                                const Config& cfg = default_config());

/// Mixed log-and-linear grid resolving both |x| <~ 1 and the decay region.
std::vector<double> default_x_grid(EnvelopeKind which, double x_abs_max, double step);
std::vector<double> default_T_grid();

} // namespace kpztail::bounds
