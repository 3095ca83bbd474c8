#pragma once

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <vector>

namespace dwsim {

// Quintic B-spline basis on a clamped knot vector. Degree 5 with simple
// interior knots gives C^4 continuity, which is what the field evaluation
// needs for 4th-order derivatives without finite differencing.
class BSplineBasis {
public:
    static constexpr int degree = 5;

    // Interpolation basis for data sites z[0..n-1]: clamped ends, interior
    // knots at all interior data sites, n+4 coefficients.
    explicit BSplineBasis(const std::vector<double>& sites) : sites_(sites) {
        const int n = static_cast<int>(sites.size());
        if (n < degree + 2) throw std::invalid_argument("BSplineBasis: too few sites");
        knots_.reserve(n - 2 + 2 * (degree + 1));
        for (int i = 0; i <= degree; ++i) knots_.push_back(sites.front());
        for (int i = 1; i + 1 < n; ++i) knots_.push_back(sites[i]);
        for (int i = 0; i <= degree; ++i) knots_.push_back(sites.back());
        n_coeffs_ = static_cast<int>(knots_.size()) - degree - 1;
    }

    int n_coeffs() const { return n_coeffs_; }
    double z_min() const { return sites_.front(); }
    double z_max() const { return sites_.back(); }
    const std::vector<double>& sites() const { return sites_; }

    int find_span(double x) const {
        const int p = degree;
        const int high = n_coeffs_;  // knots_[high] == z_max
        if (x >= knots_[high]) return high - 1;
        if (x <= knots_[p]) return p;
        auto it = std::upper_bound(knots_.begin() + p, knots_.begin() + high, x);
        return static_cast<int>(it - knots_.begin()) - 1;
    }

    // Nonzero basis functions and derivatives at x: ders[k][j] is the k-th
    // derivative of basis function (span-degree+j), k = 0..max_order.
    void basis_derivatives(double x, int span, int max_order,
                           double ders[][degree + 1]) const {
        const int p = degree;
        double ndu[degree + 1][degree + 1];
        double left[degree + 1], right[degree + 1];
        ndu[0][0] = 1.0;
        for (int j = 1; j <= p; ++j) {
            left[j] = x - knots_[span + 1 - j];
            right[j] = knots_[span + j] - x;
            double saved = 0.0;
            for (int r = 0; r < j; ++r) {
                ndu[j][r] = right[r + 1] + left[j - r];
                const double temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }
        for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];
        double a[2][degree + 1];
        for (int r = 0; r <= p; ++r) {
            int s1 = 0, s2 = 1;
            a[0][0] = 1.0;
            for (int k = 1; k <= max_order; ++k) {
                double d = 0.0;
                const int rk = r - k, pk = p - k;
                if (r >= k) {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                    d = a[s2][0] * ndu[rk][pk];
                }
                const int j1 = (rk >= -1) ? 1 : -rk;
                const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
                for (int j = j1; j <= j2; ++j) {
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                    d += a[s2][j] * ndu[rk + j][pk];
                }
                if (r <= pk) {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                ders[k][r] = d;
                std::swap(s1, s2);
            }
        }
        double r = static_cast<double>(p);
        for (int k = 1; k <= max_order; ++k) {
            for (int j = 0; j <= p; ++j) ders[k][j] *= r;
            r *= static_cast<double>(p - k);
        }
    }

    double eval(const std::vector<double>& coeffs, double x, int order) const {
        assert(static_cast<int>(coeffs.size()) == n_coeffs_);
        const int span = find_span(x);
        double ders[degree + 1][degree + 1];
        basis_derivatives(x, span, order, ders);
        double s = 0.0;
        for (int j = 0; j <= degree; ++j) s += ders[order][j] * coeffs[span - degree + j];
        return s;
    }

private:
    std::vector<double> sites_;
    std::vector<double> knots_;
    int n_coeffs_ = 0;
};

}  // namespace dwsim
