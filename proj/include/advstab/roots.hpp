#pragma once

#include <algorithm>
#include <cmath>

namespace advstab {

/// A root located by bisection with the signs of the endpoints recorded.
struct RootCertificate {
    bool found = false;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
};

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// Bisection at the geometric midpoint of a bracket [lo, hi] (lo > 0) with a
/// sign change, until hi - lo <= width * max(1, hi).
template <typename F>
RootCertificate bisect_log(F&& f, double lo, double hi, double f_lo, double f_hi, double width) {
    RootCertificate c;
    c.found = true;
    for (int it = 0; it < 200 && hi - lo > width * std::max(1.0, hi); ++it) {
        const double mid = std::sqrt(lo * hi);
        const double fm = f(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            f_lo = f_hi = 0.0;
            break;
        }
        if (sign_of(fm) == sign_of(f_lo)) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    c.lo = lo;
    c.hi = hi;
    c.f_lo = f_lo;
    c.f_hi = f_hi;
    c.value = 0.5 * (lo + hi);
    return c;
}

}  // namespace advstab
