#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "dwsim/bspline.hpp"

namespace dwsim {

// Shared immutable context of a voltage-composed on-axis potential. The
// coefficient vector is linear in the electrode voltages, so potentials on
// the same context can be interpolated coefficient-wise (used by the sweep).
struct SeriesContext {
    double k1 = 0.0;  // fundamental wavenumber pi/(2L)
    double half_length = 0.0;
};

class ComposedPotential {
public:
    ComposedPotential() = default;

    static ComposedPotential series(SeriesContext ctx, std::vector<double> amplitudes) {
        ComposedPotential p;
        p.kind_ = Kind::series;
        p.series_ = ctx;
        p.coeffs_ = std::move(amplitudes);
        return p;
    }

    static ComposedPotential spline(std::shared_ptr<const BSplineBasis> basis,
                                    std::vector<double> control) {
        ComposedPotential p;
        p.kind_ = Kind::spline;
        p.spline_ = std::move(basis);
        p.coeffs_ = std::move(control);
        return p;
    }

    bool is_series() const { return kind_ == Kind::series; }
    double z_min() const { return is_series() ? -series_.half_length : spline_->z_min(); }
    double z_max() const { return is_series() ? series_.half_length : spline_->z_max(); }
    const std::vector<double>& coefficients() const { return coeffs_; }

    // Potential (order 0, volts) or d^order Phi / dz^order.
    double eval(double z, int order) const {
        if (order < 0 || order > 4) throw std::invalid_argument("eval: order must be 0..4");
        if (z < z_min() || z > z_max()) throw std::domain_error("eval: z outside axial extent");
        if (kind_ == Kind::spline) return spline_->eval(coeffs_, z, order);
        return series_eval(z, order);
    }

    double value(double z) const { return eval(z, 0); }
    double field(double z) const { return eval(z, 1); }  // dPhi/dz, V/m

    // In-place linear interpolation between two potentials sharing a context.
    void lerp_from(const ComposedPotential& a, const ComposedPotential& b, double w) {
        kind_ = a.kind_;
        series_ = a.series_;
        spline_ = a.spline_;
        const size_t n = a.coeffs_.size();
        coeffs_.resize(n);
        const double u = 1.0 - w;
        for (size_t i = 0; i < n; ++i) coeffs_[i] = u * a.coeffs_[i] + w * b.coeffs_[i];
    }

    void add_coefficients(const std::vector<double>& delta) {
        for (size_t i = 0; i < coeffs_.size() && i < delta.size(); ++i) coeffs_[i] += delta[i];
    }

    // Number of leading series terms needed to keep the relative truncation
    // error of the given derivative order below rel_tol (series kind only).
    int effective_terms(int order, double rel_tol = 1e-11) const {
        if (kind_ != Kind::series) return static_cast<int>(coeffs_.size());
        const int n = static_cast<int>(coeffs_.size());
        std::vector<double> mag(n);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double kp = 1.0;
            for (int m = 0; m < order; ++m) kp *= (i + 1) * series_.k1;
            mag[i] = std::abs(coeffs_[i]) * kp;
            total += mag[i];
        }
        double tail = 0.0;
        for (int i = n - 1; i >= 1; --i) {
            tail += mag[i];
            if (tail > rel_tol * total) return i + 1;
        }
        return 1;
    }

    void truncate_terms(int n_keep) {
        if (kind_ == Kind::series && n_keep < static_cast<int>(coeffs_.size()))
            coeffs_.resize(n_keep);
    }

private:
    enum class Kind { series, spline };

    // Harmonic series Phi = sum_n A_n sin(n k1 u), u = z + L. Four
    // interleaved rotation chains break the serial dependency of a plain
    // recurrence; each chain advances by 4*theta per step.
    double series_eval(double z, int order) const {
        const double u = z + series_.half_length;
        const double k1 = series_.k1;
        const double th = k1 * u;
        const int n_terms = static_cast<int>(coeffs_.size());

        const double c1 = std::cos(th), s1 = std::sin(th);
        const double c2 = c1 * c1 - s1 * s1, s2 = 2.0 * s1 * c1;
        const double c3 = c2 * c1 - s2 * s1, s3 = s2 * c1 + c2 * s1;
        const double c4 = c2 * c2 - s2 * s2, s4 = 2.0 * s2 * c2;
        const double cr[4] = {c1, c2, c3, c4};
        const double sr[4] = {s1, s2, s3, s4};

        double acc_c[4] = {0, 0, 0, 0};  // sum c_{4m+r} cos(4m th)
        double acc_s[4] = {0, 0, 0, 0};  // sum c_{4m+r} sin(4m th)
        double C = 1.0, S = 0.0;         // rotates by 4*theta per block
        const double* a = coeffs_.data();
        auto weighted = [&](int idx) {
            // idx is 0-based; term n = idx+1 with coefficient A_n * (n k1)^order
            const double kn = (idx + 1) * k1;
            switch (order) {
                case 0: return a[idx];
                case 1: return a[idx] * kn;
                case 2: return -a[idx] * kn * kn;
                case 3: return -a[idx] * kn * kn * kn;
                default: return a[idx] * kn * kn * kn * kn;
            }
        };
        int idx = 0;
        for (; idx + 4 <= n_terms; idx += 4) {
            const double w0 = weighted(idx), w1 = weighted(idx + 1);
            const double w2 = weighted(idx + 2), w3 = weighted(idx + 3);
            acc_c[0] += w0 * C;
            acc_s[0] += w0 * S;
            acc_c[1] += w1 * C;
            acc_s[1] += w1 * S;
            acc_c[2] += w2 * C;
            acc_s[2] += w2 * S;
            acc_c[3] += w3 * C;
            acc_s[3] += w3 * S;
            const double Cn = C * c4 - S * s4;
            S = S * c4 + C * s4;
            C = Cn;
        }
        for (int r = 0; idx < n_terms; ++idx, ++r) {
            const double w = weighted(idx);
            acc_c[r] += w * C;
            acc_s[r] += w * S;
        }
        double out = 0.0;
        if (order % 2 == 0) {
            // sine recombination: sin((4m+r)th) = sin*cos_r + cos*sin_r
            for (int r = 0; r < 4; ++r) out += sr[r] * acc_c[r] + cr[r] * acc_s[r];
        } else {
            // cosine recombination: cos((4m+r)th) = cos*cos_r - sin*sin_r
            for (int r = 0; r < 4; ++r) out += cr[r] * acc_c[r] - sr[r] * acc_s[r];
        }
        return out;
    }

    Kind kind_ = Kind::series;
    SeriesContext series_;
    std::shared_ptr<const BSplineBasis> spline_;
    std::vector<double> coeffs_;
};

}  // namespace dwsim
