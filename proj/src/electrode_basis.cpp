#include "dwsim/electrode_basis.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dwsim/constants.hpp"

namespace dwsim {

void TrapGeometry::electrode_span(int i, double& lo, double& hi) const {
    const double pitch = electrode_width + gap;
    const double center = (i - 0.5 * (n_electrodes - 1)) * pitch;
    lo = center - 0.5 * electrode_width;
    hi = center + 0.5 * electrode_width;
}

void TrapGeometry::validate() const {
    if (n_electrodes < 5)
        throw std::invalid_argument("TrapGeometry: need at least 5 electrodes");
    if (electrode_width <= 0 || gap <= 0 || inner_radius <= 0 || boundary_margin <= 0)
        throw std::invalid_argument("TrapGeometry: all lengths must be positive");
}

namespace {

// 1/I0(x), stable for large x where I0 itself overflows.
double inv_bessel_i0(double x) {
    if (x < 30.0) return 1.0 / std::cyl_bessel_i(0.0, x);
    if (x > 650.0) return 0.0;
    // asymptotic I0(x) ~ e^x/sqrt(2 pi x) * (1 + 1/8x + 9/128x^2 + 225/3072x^3)
    const double ix = 1.0 / x;
    const double corr = 1.0 + ix * (0.125 + ix * (0.0703125 + ix * 0.0732421875));
    return std::exp(-x) * std::sqrt(2.0 * constants::pi * x) / corr;
}

// Fourier sine coefficients (over [0, 2L], k_n = n pi / 2L) of the
// piecewise-linear wall potential of one electrode: ramps 0->1 and 1->0
// across the neighbouring gaps, 1 on the electrode itself.
std::vector<double> wall_fourier(const TrapGeometry& g, int electrode, int n_terms) {
    const double L = g.axial_extent();
    double lo, hi;
    g.electrode_span(electrode, lo, hi);
    // nodes of the trapezoid in u = z + L
    const double u0 = lo - g.gap + L, u1 = lo + L, u2 = hi + L, u3 = hi + g.gap + L;
    struct Seg { double ua, ub, wa, wb; };
    const Seg segs[3] = {{u0, u1, 0.0, 1.0}, {u1, u2, 1.0, 1.0}, {u2, u3, 1.0, 0.0}};
    std::vector<double> c(n_terms, 0.0);
    for (int n = 1; n <= n_terms; ++n) {
        const double k = n * constants::pi / (2.0 * L);
        double acc = 0.0;
        for (const Seg& s : segs) {
            const double slope = (s.wb - s.wa) / (s.ub - s.ua);
            acc += (s.wa * std::cos(k * s.ua) - s.wb * std::cos(k * s.ub)) / k +
                   slope * (std::sin(k * s.ub) - std::sin(k * s.ua)) / (k * k);
        }
        c[n - 1] = acc / L;
    }
    return c;
}

}  // namespace

ElectrodeBasis ElectrodeBasis::build_analytic(const TrapGeometry& geometry, int series_terms) {
    geometry.validate();
    if (series_terms < 50)
        throw std::invalid_argument("build_analytic: series_terms must be >= 50");
    ElectrodeBasis b;
    b.geometry_ = geometry;
    b.source_ = Source::analytic_surrogate;
    b.extent_ = geometry.axial_extent();
    b.n_terms_ = series_terms;
    b.series_ctx_ = {constants::pi / (2.0 * b.extent_), b.extent_};
    b.amplitudes_.resize(geometry.n_electrodes);
    for (int i = 0; i < geometry.n_electrodes; ++i) {
        std::vector<double> c = wall_fourier(geometry, i, series_terms);
        for (int n = 1; n <= series_terms; ++n)
            c[n - 1] *= inv_bessel_i0(n * b.series_ctx_.k1 * geometry.inner_radius);
        b.amplitudes_[i] = std::move(c);
    }
    return b;
}

double ElectrodeBasis::evaluate(int electrode, double z, int order) const {
    if (electrode < 0 || electrode >= geometry_.n_electrodes)
        throw std::out_of_range("evaluate: electrode index");
    if (order < 0 || order > 4) throw std::invalid_argument("evaluate: order must be 0..4");
    if (z < -extent_ || z > extent_) throw std::domain_error("evaluate: z outside axial extent");
    if (source_ == Source::analytic_surrogate) {
        const double k1 = series_ctx_.k1;
        const double u = z + extent_;
        const std::vector<double>& a = amplitudes_[electrode];
        double s = 0.0;
        for (int n = static_cast<int>(a.size()); n >= 1; --n) {
            const double kn = n * k1;
            double kp = 1.0;
            for (int m = 0; m < order; ++m) kp *= kn;
            const double ph = kn * u;
            const double basis = (order % 2 == 0) ? std::sin(ph) : std::cos(ph);
            const double sgn = (order == 2 || order == 3) ? -1.0 : 1.0;
            s += sgn * a[n - 1] * kp * basis;
        }
        return s;
    }
    return spline_->eval(control_[electrode], z, order);
}

ComposedPotential ElectrodeBasis::compose(std::span<const double> voltages) const {
    if (static_cast<int>(voltages.size()) != geometry_.n_electrodes)
        throw std::invalid_argument("compose: voltage count does not match electrode count");
    if (source_ == Source::analytic_surrogate) {
        std::vector<double> amp(n_terms_, 0.0);
        for (int i = 0; i < geometry_.n_electrodes; ++i) {
            const double v = voltages[i];
            if (v == 0.0) continue;
            const std::vector<double>& a = amplitudes_[i];
            for (int n = 0; n < n_terms_; ++n) amp[n] += v * a[n];
        }
        return ComposedPotential::series(series_ctx_, std::move(amp));
    }
    std::vector<double> ctrl(spline_->n_coeffs(), 0.0);
    for (int i = 0; i < geometry_.n_electrodes; ++i) {
        const double v = voltages[i];
        if (v == 0.0) continue;
        const std::vector<double>& c = control_[i];
        for (size_t n = 0; n < ctrl.size(); ++n) ctrl[n] += v * c[n];
    }
    return ComposedPotential::spline(spline_, std::move(ctrl));
}

double ElectrodeBasis::tail_bound(int order) const {
    if (source_ != Source::analytic_surrogate) return 0.0;
    // |c_n| <= TV / (L k_n) with TV = 2 for a unit trapezoid; sum the next
    // 64 modes explicitly, then close with a geometric-ratio remainder.
    const double L = extent_;
    const double k1 = series_ctx_.k1;
    const double R = geometry_.inner_radius;
    double sum = 0.0, last = 0.0, prev = 0.0;
    for (int n = n_terms_ + 1; n <= n_terms_ + 64; ++n) {
        const double kn = n * k1;
        double kp = 1.0;
        for (int m = 0; m < order; ++m) kp *= kn;
        prev = last;
        last = (2.0 / (L * kn)) * kp * inv_bessel_i0(kn * R);
        sum += last;
    }
    if (prev > 0.0 && last > 0.0 && last < prev) {
        const double r = last / prev;
        sum += last * r / (1.0 - r);
    }
    return sum;
}

ElectrodeBasis ElectrodeBasis::import_table(const std::vector<double>& z,
                                            const std::vector<std::vector<double>>& phi,
                                            const std::vector<std::vector<double>>& dphi,
                                            const TrapGeometry& geometry) {
    const int n = static_cast<int>(z.size());
    const int ne = geometry.n_electrodes;
    if (static_cast<int>(phi.size()) != ne || static_cast<int>(dphi.size()) != ne)
        throw std::invalid_argument("import_table: electrode column count mismatch");
    if (n < 12) throw std::invalid_argument("import_table: need at least 12 grid rows");
    const double h = z[1] - z[0];
    if (h <= 0) throw std::invalid_argument("import_table: grid must be increasing");
    for (int i = 1; i < n; ++i) {
        const double hi = z[i] - z[i - 1];
        if (std::abs(hi - h) > 1e-6 * h)
            throw std::invalid_argument("import_table: non-uniform grid at row " +
                                        std::to_string(i));
    }
    if (h > geometry.electrode_width / 10.0)
        throw std::invalid_argument("import_table: grid too coarse (need >= 10 samples per electrode width)");
    for (int e = 0; e < ne; ++e) {
        if (static_cast<int>(phi[e].size()) != n || static_cast<int>(dphi[e].size()) != n)
            throw std::invalid_argument("import_table: ragged column for electrode " +
                                        std::to_string(e + 1));
        for (int i = 0; i < n; ++i)
            if (!std::isfinite(phi[e][i]) || !std::isfinite(dphi[e][i]))
                throw std::invalid_argument("import_table: non-finite entry at row " +
                                            std::to_string(i) + ", electrode " +
                                            std::to_string(e + 1));
    }

    ElectrodeBasis b;
    b.geometry_ = geometry;
    b.source_ = Source::imported_table;
    b.extent_ = std::min(-z.front(), z.back());
    b.n_terms_ = 0;
    auto basis = std::make_shared<BSplineBasis>(z);
    const int nc = basis->n_coeffs();  // n + 4

    // Collocation: s(z_i) = phi_i plus s' and s'' conditions at both ends
    // (s'' estimated by one-sided differences of the supplied dphi column).
    Eigen::SparseMatrix<double> A(nc, nc);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(nc * 6);
    double ders[BSplineBasis::degree + 1][BSplineBasis::degree + 1];
    auto add_row = [&](int row, double x, int order) {
        const int span = basis->find_span(x);
        basis->basis_derivatives(x, span, order, ders);
        for (int j = 0; j <= BSplineBasis::degree; ++j)
            trip.emplace_back(row, span - BSplineBasis::degree + j, ders[order][j]);
    };
    int row = 0;
    add_row(row++, z.front(), 1);
    add_row(row++, z.front(), 2);
    for (int i = 0; i < n; ++i) add_row(row++, z[i], 0);
    add_row(row++, z.back(), 2);
    add_row(row++, z.back(), 1);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("import_table: collocation factorization failed");

    b.spline_ = basis;
    b.control_.resize(ne);
    Eigen::VectorXd rhs(nc);
    for (int e = 0; e < ne; ++e) {
        int r = 0;
        rhs[r++] = dphi[e][0];
        rhs[r++] = (dphi[e][1] - dphi[e][0]) / h;
        for (int i = 0; i < n; ++i) rhs[r++] = phi[e][i];
        rhs[r++] = (dphi[e][n - 1] - dphi[e][n - 2]) / h;
        rhs[r++] = dphi[e][n - 1];
        Eigen::VectorXd sol = lu.solve(rhs);
        b.control_[e].assign(sol.data(), sol.data() + nc);
    }
    return b;
}

ElectrodeBasis ElectrodeBasis::import_csv(const std::string& path, const TrapGeometry& geometry) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("import_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("import_csv: empty file");
    const int ne = geometry.n_electrodes;
    const int want_cols = 1 + 2 * ne;
    std::vector<double> z;
    std::vector<std::vector<double>> phi(ne), dphi(ne);
    int rowno = 1;
    while (std::getline(in, line)) {
        ++rowno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("import_csv: bad number at row " +
                                         std::to_string(rowno));
            }
        }
        if (static_cast<int>(vals.size()) != want_cols)
            throw std::runtime_error("import_csv: row " + std::to_string(rowno) + " has " +
                                     std::to_string(vals.size()) + " columns, expected " +
                                     std::to_string(want_cols));
        z.push_back(vals[0]);
        for (int e = 0; e < ne; ++e) {
            phi[e].push_back(vals[1 + 2 * e]);
            dphi[e].push_back(vals[2 + 2 * e]);
        }
    }
    return import_table(z, phi, dphi, geometry);
}

}  // namespace dwsim
