#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "kpztail/common.hpp"

namespace kpztail::contour {

/// Oriented straight segment from z0 to z1.
struct Line {
    Complex z0, z1;
};

/// Truncated ray anchored at the finite endpoint z0, extending a length R in
/// direction angle. inward=true means traversal starts at the far end
/// (coming in "from infinity"), inward=false starts at z0 and goes out.
struct Ray {
    Complex z0;
    double angle = 0;
    double radius = 0;
    bool inward = false;
};

/// Circular arc z = center + radius e^{i theta}, theta from theta0 to theta1
/// (theta1 < theta0 gives clockwise traversal).
struct Arc {
    Complex center;
    double radius = 0;
    double theta0 = 0, theta1 = 0;
};

using Segment = std::variant<Line, Ray, Arc>;

Complex segment_start(const Segment& s);
Complex segment_end(const Segment& s);
double segment_length(const Segment& s);

/// Piecewise-smooth oriented path. Consecutive segments must connect
/// end-to-start within 1e-9 (checked by validate()).
struct Contour {
    std::vector<Segment> segments;

    Contour() = default;
    explicit Contour(std::vector<Segment> segs) : segments(std::move(segs)) {}

    /// Throws std::invalid_argument if malformed (disconnected, degenerate
    /// segments, or self-intersecting on a coarse sample).
    void validate() const;

    Contour reversed() const;
};

struct QuadResult {
    Complex value{0, 0};
    double abs_error_estimate = 0;
    long nodes_used = 0;
};

using Integrand = std::function<Complex(Complex)>;

/// Adaptive composite Gauss-Legendre integration of f along the contour.
/// Per segment, panel counts double until successive estimates differ by
/// less than max(abs_tol/n_segments, rel_tol*|estimate|). Throws
/// NumericalError (carrying the best estimate) past the node cap.
QuadResult integrate(const Contour& c, const Integrand& f, double abs_tol,
                     const Config& cfg = default_config());

/// |I(c1) - I(c2) - 2 pi i sum(residues)|: residual of a contour deformation.
double deform_check(const Contour& c1, const Contour& c2, const Integrand& f,
                    const std::vector<Complex>& residues_between,
                    double abs_tol, const Config& cfg = default_config());

std::string to_json(const Contour& c);
Contour from_json(const std::string& text);

} // namespace kpztail::contour
