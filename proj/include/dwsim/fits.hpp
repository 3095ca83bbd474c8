#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace dwsim {

// Relative RMS residual of a fit: rms(y - yhat) / rms(y).
double rel_rms_residual(std::span<const double> y, std::span<const double> yhat);

struct LineFit {
    double intercept = 0.0, slope = 0.0;
    double rel_residual = 0.0;
};
LineFit fit_linear(std::span<const double> x, std::span<const double> y);

// Least-squares c for y = c * x^power (power may be negative or zero).
struct PowerFit {
    double coeff = 0.0;
    double power = 0.0;
    double rel_residual = 0.0;
};
PowerFit fit_power_coefficient(std::span<const double> x, std::span<const double> y,
                               double power);

struct LorentzianFit {
    double amplitude = 0.0;
    double center = 0.0;
    double gamma_hwhm = 0.0;
    double rel_residual = 0.0;
    bool converged = false;
};

// A * g^2 / ((x-x0)^2 + g^2) through weighted quadratic regression of 1/y
// (closed form); exact on noiseless Lorentzian data.
LorentzianFit fit_lorentzian(std::span<const double> x, std::span<const double> y);

}  // namespace dwsim
