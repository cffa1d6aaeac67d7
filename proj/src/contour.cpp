#include "kpztail/contour.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <json.hpp>

namespace kpztail::contour {

namespace {

// 16-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGLx = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542,
};
constexpr std::array<double, 8> kGLw = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806,
};

struct Param {
    // z(u), dz/du on u in [0, 1]
    std::function<Complex(double)> z;
    Complex dz; // constant for lines/rays; arcs handled separately
    bool is_arc = false;
    Complex arc_center;
    double arc_radius = 0, th0 = 0, th1 = 0;
};

Param parameterize(const Segment& s) {
    Param p;
    if (std::holds_alternative<Line>(s)) {
        const auto& l = std::get<Line>(s);
        p.z = [l](double u) { return l.z0 + (l.z1 - l.z0) * u; };
        p.dz = l.z1 - l.z0;
    } else if (std::holds_alternative<Ray>(s)) {
        const auto& r = std::get<Ray>(s);
        Complex dir = std::polar(r.radius, r.angle);
        Complex a = r.inward ? r.z0 + dir : r.z0;
        Complex b = r.inward ? r.z0 : r.z0 + dir;
        p.z = [a, b](double u) { return a + (b - a) * u; };
        p.dz = b - a;
    } else {
        const auto& a = std::get<Arc>(s);
        p.is_arc = true;
        p.arc_center = a.center;
        p.arc_radius = a.radius;
        p.th0 = a.theta0;
        p.th1 = a.theta1;
        p.z = [a](double u) {
            return a.center + std::polar(a.radius, a.theta0 + (a.theta1 - a.theta0) * u);
        };
    }
    return p;
}

Complex gl_panel(const Param& p, const Integrand& f, double u0, double u1) {
    double mid = 0.5 * (u0 + u1), half = 0.5 * (u1 - u0);
    Complex acc{0, 0};
    for (int k = 0; k < 8; ++k) {
        for (double sgn : {-1.0, 1.0}) {
            double u = mid + sgn * half * kGLx[k];
            Complex z = p.z(u);
            Complex dz = p.dz;
            if (p.is_arc) {
                double th = p.th0 + (p.th1 - p.th0) * u;
                dz = Complex(0, 1) * std::polar(p.arc_radius, th) * (p.th1 - p.th0);
            }
            acc += kGLw[k] * f(z) * dz;
        }
    }
    return acc * half;
}

Complex composite(const Param& p, const Integrand& f, int panels) {
    Complex acc{0, 0};
    for (int j = 0; j < panels; ++j) {
        acc += gl_panel(p, f, static_cast<double>(j) / panels,
                        static_cast<double>(j + 1) / panels);
    }
    return acc;
}

} // namespace

Complex segment_start(const Segment& s) {
    if (std::holds_alternative<Line>(s)) return std::get<Line>(s).z0;
    if (std::holds_alternative<Ray>(s)) {
        const auto& r = std::get<Ray>(s);
        return r.inward ? r.z0 + std::polar(r.radius, r.angle) : r.z0;
    }
    const auto& a = std::get<Arc>(s);
    return a.center + std::polar(a.radius, a.theta0);
}

Complex segment_end(const Segment& s) {
    if (std::holds_alternative<Line>(s)) return std::get<Line>(s).z1;
    if (std::holds_alternative<Ray>(s)) {
        const auto& r = std::get<Ray>(s);
        return r.inward ? r.z0 : r.z0 + std::polar(r.radius, r.angle);
    }
    const auto& a = std::get<Arc>(s);
    return a.center + std::polar(a.radius, a.theta1);
}

double segment_length(const Segment& s) {
    if (std::holds_alternative<Line>(s)) {
        const auto& l = std::get<Line>(s);
        return std::abs(l.z1 - l.z0);
    }
    if (std::holds_alternative<Ray>(s)) return std::get<Ray>(s).radius;
    const auto& a = std::get<Arc>(s);
    return a.radius * std::abs(a.theta1 - a.theta0);
}

void Contour::validate() const {
    if (segments.empty()) throw std::invalid_argument("contour: no segments");
    for (const auto& s : segments) {
        if (std::holds_alternative<Line>(s)) {
            const auto& l = std::get<Line>(s);
            if (std::abs(l.z1 - l.z0) == 0) {
                throw std::invalid_argument("contour: degenerate line");
            }
        } else if (std::holds_alternative<Ray>(s)) {
            if (!(std::get<Ray>(s).radius > 0)) {
                throw std::invalid_argument("contour: ray truncation must be > 0");
            }
        } else if (!(std::get<Arc>(s).radius > 0)) {
            throw std::invalid_argument("contour: arc radius must be > 0");
        }
    }
    for (size_t i = 0; i + 1 < segments.size(); ++i) {
        if (std::abs(segment_end(segments[i]) - segment_start(segments[i + 1])) > 1e-9) {
            throw std::invalid_argument("contour: segments " + std::to_string(i) + "," +
                                        std::to_string(i + 1) + " do not connect");
        }
    }
    // coarse non-self-intersection check: sampled points of non-adjacent
    // segments must stay separated
    constexpr int kSamples = 17;
    for (size_t i = 0; i + 2 <= segments.size(); ++i) {
        auto pi = parameterize(segments[i]);
        for (size_t j = i + 2; j < segments.size(); ++j) {
            auto pj = parameterize(segments[j]);
            for (int a = 1; a < kSamples - 1; ++a) {
                for (int b = 1; b < kSamples - 1; ++b) {
                    double ua = static_cast<double>(a) / (kSamples - 1);
                    double ub = static_cast<double>(b) / (kSamples - 1);
                    if (std::abs(pi.z(ua) - pj.z(ub)) < 1e-12) {
                        throw std::invalid_argument("contour: self-intersection detected");
                    }
                }
            }
        }
    }
}

Contour Contour::reversed() const {
    Contour out;
    out.segments.reserve(segments.size());
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
        if (std::holds_alternative<Line>(*it)) {
            const auto& l = std::get<Line>(*it);
            out.segments.push_back(Line{l.z1, l.z0});
        } else if (std::holds_alternative<Ray>(*it)) {
            auto r = std::get<Ray>(*it);
            r.inward = !r.inward;
            out.segments.push_back(r);
        } else {
            const auto& a = std::get<Arc>(*it);
            out.segments.push_back(Arc{a.center, a.radius, a.theta1, a.theta0});
        }
    }
    return out;
}

QuadResult integrate(const Contour& c, const Integrand& f, double abs_tol,
                     const Config& cfg) {
    if (!(abs_tol > 0)) throw std::invalid_argument("integrate: abs_tol must be > 0");
    QuadResult total;
    const double seg_tol = abs_tol / static_cast<double>(c.segments.size());
    for (const auto& s : c.segments) {
        Param p = parameterize(s);
        int panels = std::max(1, static_cast<int>(std::ceil(segment_length(s) / 2.0)));
        Complex prev = composite(p, f, panels);
        long nodes = 16L * panels;
        double err = std::numeric_limits<double>::infinity();
        Complex cur = prev;
        while (true) {
            panels *= 2;
            if (16L * panels > cfg.max_nodes_per_segment) {
                total.value += cur;
                total.abs_error_estimate += err;
                total.nodes_used += nodes;
                throw NumericalError("integrate: panel cap exceeded", total.value,
                                     total.abs_error_estimate);
            }
            cur = composite(p, f, panels);
            nodes += 16L * panels;
            err = std::abs(cur - prev);
            if (err < std::max(seg_tol, cfg.rel_tol * std::abs(cur))) break;
            prev = cur;
        }
        total.value += cur;
        total.abs_error_estimate += err;
        total.nodes_used += nodes;
    }
    return total;
}

double deform_check(const Contour& c1, const Contour& c2, const Integrand& f,
                    const std::vector<Complex>& residues_between, double abs_tol,
                    const Config& cfg) {
    QuadResult a = integrate(c1, f, abs_tol, cfg);
    QuadResult b = integrate(c2, f, abs_tol, cfg);
    Complex res{0, 0};
    for (Complex r : residues_between) res += r;
    return std::abs(a.value - b.value - Complex(0, kTwoPi) * res);
}

std::string to_json(const Contour& c) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : c.segments) {
        nlohmann::json j;
        if (std::holds_alternative<Line>(s)) {
            const auto& l = std::get<Line>(s);
            j = {{"type", "line"},
                 {"z0", {l.z0.real(), l.z0.imag()}},
                 {"z1", {l.z1.real(), l.z1.imag()}}};
        } else if (std::holds_alternative<Ray>(s)) {
            const auto& r = std::get<Ray>(s);
            j = {{"type", "ray"},
                 {"z0", {r.z0.real(), r.z0.imag()}},
                 {"angle", r.angle},
                 {"radius", r.radius},
                 {"inward", r.inward}};
        } else {
            const auto& a = std::get<Arc>(s);
            j = {{"type", "arc"},
                 {"center", {a.center.real(), a.center.imag()}},
                 {"radius", a.radius},
                 {"theta0", a.theta0},
                 {"theta1", a.theta1}};
        }
        segs.push_back(j);
    }
    return nlohmann::json{{"segments", segs}}.dump();
}

Contour from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    Contour c;
    for (const auto& s : j.at("segments")) {
        std::string type = s.at("type");
        if (type == "line") {
            c.segments.push_back(Line{Complex(s.at("z0")[0], s.at("z0")[1]),
                                      Complex(s.at("z1")[0], s.at("z1")[1])});
        } else if (type == "ray") {
            c.segments.push_back(Ray{Complex(s.at("z0")[0], s.at("z0")[1]), s.at("angle"),
                                     s.at("radius"), s.at("inward")});
        } else if (type == "arc") {
            c.segments.push_back(Arc{Complex(s.at("center")[0], s.at("center")[1]),
                                     s.at("radius"), s.at("theta0"), s.at("theta1")});
        } else {
            throw std::invalid_argument("contour: unknown segment type " + type);
        }
    }
    return c;
}

} // namespace kpztail::contour
