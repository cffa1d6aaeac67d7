// Test-only oracles, independent of the library's evaluation paths.
//
// The Airy oracle sums the Maclaurin series of Ai in double-double arithmetic
// (the series cancels catastrophically in plain doubles for x ~ 10), with the
// two base constants taken from the real std::tgamma. Nothing here touches
// the contour machinery under test.

#pragma once

#include <cmath>
#include <cstdlib>

namespace oracle {

// ---- minimal double-double arithmetic (Dekker/Knuth) ----
struct DD {
    double hi = 0, lo = 0;
};

inline DD dd_from(double a) { return {a, 0}; }

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline DD quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline DD dd_add(DD a, DD b) {
    DD s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline DD dd_mul(DD a, DD b) {
    DD p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline DD dd_mul_d(DD a, double b) {
    DD p = two_prod(a.hi, b);
    p.lo += a.lo * b;
    return quick_two_sum(p.hi, p.lo);
}

inline DD dd_div_d(DD a, double b) {
    double q1 = a.hi / b;
    DD p = two_prod(q1, b);
    double r = ((a.hi - p.hi) - p.lo) + a.lo;
    double q2 = r / b;
    return quick_two_sum(q1, q2);
}

// ---- Maclaurin-series Airy: Ai = Ai(0) f + Ai'(0) g, f'' relations from
// y'' = x y; valid (in dd) for |x| <= ~14 ----
struct AiryOracle {
    double ai = 0, aip = 0;
};

inline AiryOracle airy_series(double x) {
    // Ai(0) = 3^{-2/3}/Gamma(2/3) and Ai'(0) = -3^{-1/3}/Gamma(1/3) to
    // double-double precision (the plain-double constants would leave
    // ~1e-9 absolute error after the series' cancellation at x ~ 10)
    const DD a0{0.3550280538878172, 2.05233632436212e-17};
    const DD b0{-0.2588194037928068, 2.522243111610832e-17};
    DD x3 = dd_mul(dd_from(x), dd_mul(dd_from(x), dd_from(x)));

    // f = sum t_k, t_0 = 1, t_k = t_{k-1} x^3 / ((3k-1)(3k))
    // g = sum u_k, u_0 = x, u_k = u_{k-1} x^3 / ((3k)(3k+1))
    DD t = dd_from(1.0), u = dd_from(x);
    DD f = t, g = u;
    DD fp = dd_from(0.0), gp = dd_from(0.0); // sums of 3k t_k / x and (3k+1) u_k / x
    if (x != 0) gp = dd_div_d(u, x);
    for (int k = 1; k <= 400; ++k) {
        t = dd_div_d(dd_mul(t, x3), (3.0 * k - 1.0) * (3.0 * k));
        u = dd_div_d(dd_mul(u, x3), (3.0 * k) * (3.0 * k + 1.0));
        f = dd_add(f, t);
        g = dd_add(g, u);
        if (x != 0) {
            fp = dd_add(fp, dd_div_d(dd_mul_d(t, 3.0 * k), x));
            gp = dd_add(gp, dd_div_d(dd_mul_d(u, 3.0 * k + 1.0), x));
        }
        if (std::abs(t.hi) < 1e-40 * std::abs(f.hi) &&
            std::abs(u.hi) < 1e-40 * std::max(std::abs(g.hi), 1e-300) && k > 4) {
            break;
        }
    }
    AiryOracle r;
    r.ai = dd_add(dd_mul(a0, f), dd_mul(b0, g)).hi;
    r.aip = (x != 0) ? dd_add(dd_mul(a0, fp), dd_mul(b0, gp)).hi : b0.hi;
    return r;
}

inline double airy_ai(double x) { return airy_series(x).ai; }
inline double airy_aip(double x) { return airy_series(x).aip; }

} // namespace oracle
