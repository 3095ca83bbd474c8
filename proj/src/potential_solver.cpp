#include "dwsim/potential_solver.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <functional>

#include "dwsim/constants.hpp"

namespace dwsim {

DoubleWellSpec make_double_well_spec(const ParticleSpecies& a, const ParticleSpecies& b,
                                     double f_a, double f_b, double s0, double delta_s0,
                                     bool null_higher_orders, double quartic_a) {
    DoubleWellSpec spec;
    spec.species_a = a;
    spec.species_b = b;
    spec.z_a0 = delta_s0 - 0.5 * s0;
    spec.z_b0 = delta_s0 + 0.5 * s0;
    spec.omega_a = 2.0 * constants::pi * f_a;
    spec.omega_b = 2.0 * constants::pi * f_b;
    spec.delta_s0 = delta_s0;
    spec.null_higher_orders = null_higher_orders;
    spec.quartic_a = quartic_a;
    return spec;
}

ConstraintSystem assemble_constraints(const DoubleWellSpec& spec, const ElectrodeBasis& basis) {
    const int ne = basis.n_electrodes();
    if (spec.z_a0 == spec.z_b0) throw SolverError("assemble_constraints: coincident minima");
    if (spec.omega_a <= 0 || spec.omega_b <= 0)
        throw SolverError("assemble_constraints: frequencies must be positive");
    const double ext = basis.axial_extent();
    if (std::abs(spec.z_a0) >= ext || std::abs(spec.z_b0) >= ext)
        throw SolverError("assemble_constraints: minima outside axial extent");

    struct Row {
        int order;
        double z;
        double target;
        std::string name;
    };
    std::vector<Row> rows = {
        {1, spec.z_a0, 0.0, "field@a"},
        {1, spec.z_b0, 0.0, "field@b"},
        {2, spec.z_a0, spec.species_a.mass * spec.omega_a * spec.omega_a / spec.species_a.charge,
         "curvature@a"},
        {2, spec.z_b0, spec.species_b.mass * spec.omega_b * spec.omega_b / spec.species_b.charge,
         "curvature@b"},
    };
    if (spec.null_higher_orders) {
        rows.push_back({3, spec.z_a0, 0.0, "d3@a"});
        rows.push_back({3, spec.z_b0, 0.0, "d3@b"});
        rows.push_back({4, spec.z_a0, spec.quartic_a, "d4@a"});
        rows.push_back({4, spec.z_b0, 0.0, "d4@b"});
    }
    const int nr = static_cast<int>(rows.size());
    if (nr > ne)
        throw SolverError("assemble_constraints: " + std::to_string(nr) + " rows exceed " +
                          std::to_string(ne) + " electrodes");

    ConstraintSystem sys;
    sys.matrix.resize(nr, ne);
    sys.targets.resize(nr);
    sys.row_scale.resize(nr);
    for (int r = 0; r < nr; ++r) {
        double scale = 0.0;
        for (int i = 0; i < ne; ++i) {
            const double v = basis.evaluate(i, rows[r].z, rows[r].order);
            sys.matrix(r, i) = v;
            scale = std::max(scale, std::abs(v));
        }
        sys.targets[r] = rows[r].target;
        sys.row_scale[r] = (scale > 0) ? scale : 1.0;
        sys.row_names.push_back(rows[r].name);
    }
    return sys;
}

VoltageSet solve_min_norm(const ConstraintSystem& sys) {
    // Balance rows by their characteristic magnitude before the SVD; mixed
    // derivative orders differ by ~10 decades in SI. Row scaling leaves the
    // solution set and the row space unchanged, so the minimum-norm solution
    // is identical in exact arithmetic.
    const Eigen::MatrixXd A = sys.row_scale.cwiseInverse().asDiagonal() * sys.matrix;
    const Eigen::VectorXd b = sys.targets.cwiseQuotient(sys.row_scale);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double tol = 1e-10 * svd.singularValues()(0);
    if (svd.singularValues()(svd.singularValues().size() - 1) < tol) {
        std::string offending;
        const Eigen::VectorXd u =
            svd.matrixU().col(svd.singularValues().size() - 1).cwiseAbs();
        for (int r = 0; r < u.size(); ++r)
            if (u(r) > 0.3) offending += (offending.empty() ? "" : "+") + sys.row_names[r];
        throw SolverError("solve_min_norm: rank-deficient constraints (" + offending + ")");
    }
    svd.setThreshold(1e-12);
    const Eigen::VectorXd x = svd.solve(b);

    VoltageSet out;
    out.voltages.assign(x.data(), x.data() + x.size());
    out.norm = x.norm();
    out.residual = (A * x - b).cwiseAbs().maxCoeff();
    out.max_abs_voltage = x.cwiseAbs().maxCoeff();
    out.over_voltage_warning = out.max_abs_voltage > 10.0;
    return out;
}

double locate_minimum(const ComposedPotential& pot, double z_guess, double charge,
                      double search_halfwidth) {
    // Bracket a sign change of U' = q Phi' around the guess, then bisect with
    // Newton polish. Field scale sets the convergence target.
    auto du = [&](double z) { return charge * pot.eval(z, 1); };
    double lo = z_guess, hi = z_guess;
    double flo = du(lo), fhi = flo;
    double w = search_halfwidth / 64.0;
    bool bracketed = false;
    for (int it = 0; it < 64 && !bracketed; ++it) {
        lo = std::max(z_guess - (it + 1) * w, pot.z_min() * 0.999);
        hi = std::min(z_guess + (it + 1) * w, pot.z_max() * 0.999);
        flo = du(lo);
        fhi = du(hi);
        if (flo < 0.0 && fhi > 0.0) bracketed = true;
        if ((it + 1) * w >= search_halfwidth) break;
    }
    if (!bracketed) throw CharacterizationError("locate_minimum: no bracketed minimum near guess");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = du(mid);
        if (fm < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-16 + 1e-15 * std::abs(mid)) break;
    }
    double z = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double d1 = du(z), d2 = charge * pot.eval(z, 2);
        if (d2 <= 0.0) break;
        const double step = d1 / d2;
        if (std::abs(step) > hi - lo) break;
        z -= step;
    }
    return z;
}

namespace {

// Walk outward from the minimum to the first barrier crest; polish the crest
// by bisection on U'.
double scan_barrier(const ComposedPotential& pot, double z_min, double charge, double direction,
                    double* z_at_barrier) {
    auto u = [&](double z) { return charge * pot.value(z); };
    const double zend = (direction > 0 ? pot.z_max() : pot.z_min()) * 0.995;
    const double h = direction * (pot.z_max() - pot.z_min()) / 8000.0;
    double peak = u(z_min), zpeak = z_min;
    double z = z_min;
    const double floor_val = peak;
    while ((direction > 0 && z + h < zend) || (direction < 0 && z + h > zend)) {
        z += h;
        const double v = u(z);
        if (v > peak) {
            peak = v;
            zpeak = z;
        } else if (peak > floor_val && v < peak - 1e-3 * (peak - floor_val)) {
            break;  // passed a crest
        }
    }
    if (zpeak != z_min) {
        auto du = [&](double zz) { return charge * pot.eval(zz, 1); };
        double lo = zpeak - std::abs(h), hi = zpeak + std::abs(h);
        lo = std::max(lo, pot.z_min() * 0.999);
        hi = std::min(hi, pot.z_max() * 0.999);
        if (du(lo) > 0.0 && du(hi) < 0.0) {
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (du(mid) > 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            zpeak = 0.5 * (lo + hi);
            peak = u(zpeak);
        }
    }
    if (z_at_barrier) *z_at_barrier = zpeak;
    return peak;
}

double crossing(const ComposedPotential& pot, double charge, double level, double z_from,
                double z_to) {
    auto u = [&](double z) { return charge * pot.value(z); };
    double lo = z_from, hi = z_to;
    if (u(lo) > level) return z_from;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (u(mid) < level)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

WellInfo characterize_well(const ComposedPotential& pot, double z_guess, double charge,
                           double mass, double partner_direction) {
    using namespace constants;
    WellInfo w;
    const double span = pot.z_max() - pot.z_min();
    w.z_min = locate_minimum(pot, z_guess, charge, span / 6.0);
    const double curv = charge * pot.eval(w.z_min, 2);
    if (curv <= 0.0)
        throw CharacterizationError("characterize_well: non-confining curvature at minimum");
    w.f_local = std::sqrt(curv / mass) / (2.0 * pi);

    double z_in = 0.0, z_out = 0.0;
    const double u_min = charge * pot.value(w.z_min);
    const double inner = scan_barrier(pot, w.z_min, charge, partner_direction, &z_in);
    const double outer = scan_barrier(pot, w.z_min, charge, -partner_direction, &z_out);
    w.barrier_inner_K = (inner - u_min) / k_boltzmann;
    w.barrier_outer_K = (outer - u_min) / k_boltzmann;
    if (w.barrier_inner_K <= 0.0 && w.barrier_outer_K <= 0.0)
        throw CharacterizationError("characterize_well: no confining barrier found");
    w.depth_K = std::min(w.barrier_inner_K, w.barrier_outer_K);

    const double level = u_min + w.depth_K * k_boltzmann;
    const double z_lo_side = (partner_direction > 0) ? z_out : z_in;
    const double z_hi_side = (partner_direction > 0) ? z_in : z_out;
    w.trap_lo = crossing(pot, charge, level, w.z_min, z_lo_side);
    w.trap_hi = crossing(pot, charge, level, w.z_min, z_hi_side);
    return w;
}

WellCharacterization characterize(const ComposedPotential& pot, const DoubleWellSpec& spec) {
    WellCharacterization c;
    const double dir_a = (spec.z_b0 > spec.z_a0) ? +1.0 : -1.0;
    c.a = characterize_well(pot, spec.z_a0, spec.species_a.charge, spec.species_a.mass, dir_a);
    c.b = characterize_well(pot, spec.z_b0, spec.species_b.charge, spec.species_b.mass, -dir_a);
    return c;
}

OffsetScanResult optimize_offset(const DoubleWellSpec& base, const ElectrodeBasis& basis,
                                 double half_range, double step,
                                 const std::function<double(const DoubleWellSpec&)>& score) {
    OffsetScanResult res;
    double best = -1.0;
    const int n = static_cast<int>(std::round(2.0 * half_range / step)) + 1;
    res.table.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double ds = -half_range + i * step;
        DoubleWellSpec spec = base;
        const double s0 = base.s0();
        spec.z_a0 = ds - 0.5 * s0;
        spec.z_b0 = ds + 0.5 * s0;
        spec.delta_s0 = ds;
        double val = 0.0;
        try {
            val = score(spec);
        } catch (const std::exception&) {
            val = -1.0;  // infeasible offsets score below everything
        }
        res.table.push_back({ds, val});
        // ties resolve toward the smallest |delta_s0|
        const double tol = 1e-9 * std::max(std::abs(val), std::abs(best));
        if (val > best + tol ||
            (std::abs(val - best) <= tol && std::abs(ds) < std::abs(res.best_delta_s0))) {
            best = val;
            res.best_delta_s0 = ds;
        }
    }
    if (best < 0.0) res.best_delta_s0 = 0.0;
    return res;
}

}  // namespace dwsim
