#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dwsim {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
struct GaussLegendre {
    std::vector<double> x, w;

    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = xi;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (xi * p1 - p0) / (xi * xi - 1.0);
                const double dx = p1 / pp;
                xi -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            x[i] = xi;
            w[i] = 2.0 / ((1.0 - xi * xi) * pp * pp);
        }
    }
};

inline const GaussLegendre& gauss_legendre_64() {
    static const GaussLegendre gl(64);
    return gl;
}

// Bisection for f(z) = level, assuming f(lo) < level < f(hi) monotone-ish.
template <class F>
double bisect_to_level(F&& f, double lo, double hi, double level, int iters = 100) {
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < level)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace dwsim
