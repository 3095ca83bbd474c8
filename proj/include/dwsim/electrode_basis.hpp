#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dwsim/composed_potential.hpp"

namespace dwsim {

struct TrapGeometry {
    int n_electrodes = 9;
    double electrode_width = 200e-6;  // m
    double gap = 50e-6;               // m
    double inner_radius = 400e-6;     // m
    double boundary_margin = 2e-3;    // grounded margin beyond the stack, m

    double stack_half_length() const {
        return 0.5 * (n_electrodes * electrode_width + (n_electrodes - 1) * gap);
    }
    double axial_extent() const { return stack_half_length() + boundary_margin; }
    // axial span [lo, hi] of electrode i, centers symmetric about z = 0
    void electrode_span(int i, double& lo, double& hi) const;
    void validate() const;
};

// Per-electrode unit-voltage on-axis potentials phi_i(z) with analytic
// derivatives up to 4th order. Either the ideal-cylinder surrogate (boundary
// value series, gaps bridged by linear wall-potential interpolation) or
// a quintic-spline interpolant of imported tabulated data.
class ElectrodeBasis {
public:
    enum class Source { analytic_surrogate, imported_table };

    static ElectrodeBasis build_analytic(const TrapGeometry& geometry, int series_terms = 200);

    // CSV with header z,phi_1,dphi_1,...,phi_n,dphi_n (SI units, uniform grid).
    static ElectrodeBasis import_csv(const std::string& path, const TrapGeometry& geometry);
    static ElectrodeBasis import_table(const std::vector<double>& z,
                                       const std::vector<std::vector<double>>& phi,
                                       const std::vector<std::vector<double>>& dphi,
                                       const TrapGeometry& geometry);

    double evaluate(int electrode, double z, int order) const;
    ComposedPotential compose(std::span<const double> voltages) const;

    int n_electrodes() const { return geometry_.n_electrodes; }
    double axial_extent() const { return extent_; }
    const TrapGeometry& geometry() const { return geometry_; }
    Source source() const { return source_; }
    int series_terms() const { return n_terms_; }

    // Certified bound on the truncated series tail for the given derivative
    // order (analytic surrogate only; the spline interpolant has no tail).
    double tail_bound(int order) const;

    const SeriesContext& series_context() const { return series_ctx_; }

private:
    TrapGeometry geometry_;
    Source source_ = Source::analytic_surrogate;
    double extent_ = 0.0;
    int n_terms_ = 0;

    // analytic: amplitudes_[i][n] for electrode i, mode n+1
    std::vector<std::vector<double>> amplitudes_;
    SeriesContext series_ctx_;

    // imported: shared spline basis + per-electrode control points
    std::shared_ptr<const BSplineBasis> spline_;
    std::vector<std::vector<double>> control_;
};

}  // namespace dwsim
