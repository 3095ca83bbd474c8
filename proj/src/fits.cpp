#include "dwsim/fits.hpp"

#include <Eigen/Dense>

namespace dwsim {

double rel_rms_residual(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size() || y.empty())
        throw std::invalid_argument("rel_rms_residual: size mismatch");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        num += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        den += y[i] * y[i];
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num / y.size());
}

LineFit fit_linear(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_linear: need at least 2 points");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    const double det = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    std::vector<double> yhat(x.size());
    for (size_t i = 0; i < x.size(); ++i) yhat[i] = f.intercept + f.slope * x[i];
    f.rel_residual = rel_rms_residual(y, yhat);
    return f;
}

PowerFit fit_power_coefficient(std::span<const double> x, std::span<const double> y,
                               double power) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("fit_power_coefficient: empty input");
    double num = 0.0, den = 0.0;
    std::vector<double> basis(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        basis[i] = std::pow(x[i], power);
        num += basis[i] * y[i];
        den += basis[i] * basis[i];
    }
    PowerFit f;
    f.power = power;
    f.coeff = num / den;
    std::vector<double> yhat(x.size());
    for (size_t i = 0; i < x.size(); ++i) yhat[i] = f.coeff * basis[i];
    f.rel_residual = rel_rms_residual(y, yhat);
    return f;
}

LorentzianFit fit_lorentzian(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 4)
        throw std::invalid_argument("fit_lorentzian: need at least 4 points");
    LorentzianFit f;

    // 1/y = alpha + beta x + delta x^2 with weights w; two weighting passes
    // (w = y^4, then w = L^4 of the first pass) is enough in practice.
    std::vector<double> w(x.size());
    for (size_t i = 0; i < x.size(); ++i) w[i] = std::max(y[i], 0.0);
    for (int pass = 0; pass < 2; ++pass) {
        Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
        Eigen::Vector3d r = Eigen::Vector3d::Zero();
        int used = 0;
        for (size_t i = 0; i < x.size(); ++i) {
            if (y[i] <= 0.0) continue;
            const double wi = std::pow(w[i], 4);
            if (wi <= 0.0) continue;
            const Eigen::Vector3d phi(1.0, x[i], x[i] * x[i]);
            M += wi * phi * phi.transpose();
            r += wi * (1.0 / y[i]) * phi;
            ++used;
        }
        if (used < 4) return f;
        const Eigen::Vector3d c = M.ldlt().solve(r);
        const double alpha = c(0), beta = c(1), delta = c(2);
        if (delta <= 0.0) return f;
        f.center = -beta / (2.0 * delta);
        const double inv_amp = alpha - delta * f.center * f.center;
        if (inv_amp <= 0.0) return f;
        f.amplitude = 1.0 / inv_amp;
        const double g2 = inv_amp / delta;
        if (g2 <= 0.0) return f;
        f.gamma_hwhm = std::sqrt(g2);
        for (size_t i = 0; i < x.size(); ++i) {
            const double dx = x[i] - f.center;
            w[i] = f.amplitude * g2 / (dx * dx + g2);
        }
    }
    std::vector<double> yhat(x.size());
    const double g2 = f.gamma_hwhm * f.gamma_hwhm;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - f.center;
        yhat[i] = f.amplitude * g2 / (dx * dx + g2);
    }
    f.rel_residual = rel_rms_residual(y, yhat);
    f.converged = true;
    return f;
}

}  // namespace dwsim
