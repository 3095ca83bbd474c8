#include "dwsim/protocols.hpp"

#include <cmath>
#include <sstream>

namespace dwsim {

namespace {

double turning_point(const ComposedPotential& pot, double charge, double z_min_pos, double energy,
                     double direction) {
    const double phi0 = pot.value(z_min_pos);
    auto U = [&](double z) { return charge * (pot.value(z) - phi0); };
    const double bound = (direction > 0 ? pot.z_max() : pot.z_min()) * 0.98;
    double step = direction * 1e-7;
    double prev = z_min_pos, z = z_min_pos + step;
    double u_prev = 0.0;
    while ((direction > 0 && z < bound) || (direction < 0 && z > bound)) {
        const double u = U(z);
        if (u >= energy) return bisect_to_level(U, prev, z, energy);
        if (u < u_prev - 1e-3 * energy)
            throw UntrappedError("turning_point: energy above barrier");
        u_prev = u;
        prev = z;
        step *= 1.4;
        z += step;
    }
    if (U(bound) >= energy) return bisect_to_level(U, prev, bound, energy);
    throw UntrappedError("turning_point: energy above barrier");
}

}  // namespace

TwoBodyState initialize_in_potential(const ComposedPotential& pot, const DoubleWellSpec& spec,
                                     double e_init, const InitPhases& phases,
                                     const CoolantInit& coolant, double dt) {
    using namespace constants;
    const double span = pot.z_max() - pot.z_min();
    const double z_min_a = locate_minimum(pot, spec.z_a0, spec.species_a.charge, span / 6.0);
    const double z_min_b = locate_minimum(pot, spec.z_b0, spec.species_b.charge, span / 6.0);

    TwoBodyState st;
    st.t = 0.0;
    if (e_init <= 0.0) {
        st.z_a = z_min_a;
        st.v_a = 0.0;
    } else {
        const double inner = (spec.z_b0 > spec.z_a0) ? +1.0 : -1.0;
        const double dir = (phases.side_u < 0.5) ? inner : -inner;
        st.z_a = turning_point(pot, spec.species_a.charge, z_min_a, e_init, dir);
        st.v_a = 0.0;
        if (phases.phase_u > 0.0) {
            const double f_e =
                axial_frequency_at_energy(pot, spec.species_a, z_min_a, e_init);
            const auto n_burn =
                static_cast<std::int64_t>(std::floor(phases.phase_u / (f_e * dt)));
            if (n_burn > 0) {
                StaticPotentialTrap trap(&pot, spec);
                integrate_single_a(trap, spec.species_a.mass, st.z_a, st.v_a, dt, n_burn);
            }
        }
    }

    const double curv_b = spec.species_b.charge * pot.eval(z_min_b, 2);
    const double omega_b = std::sqrt(curv_b / spec.species_b.mass);
    const double e_b = coolant.zero_energy ? 0.0 : 0.5 * hbar * omega_b;
    if (e_b <= 0.0) {
        st.z_b = z_min_b;
        st.v_b = 0.0;
    } else {
        const double amp = std::sqrt(2.0 * e_b / (spec.species_b.mass * omega_b * omega_b));
        const double th = 2.0 * pi * phases.be_phase_u;
        st.z_b = z_min_b + amp * std::sin(th);
        st.v_b = amp * omega_b * std::cos(th);
    }
    return st;
}

// ---------------------------------------------------------------------------
// Harmonic coupling
// ---------------------------------------------------------------------------

namespace {

template <class Trap>
HarmonicCouplingResult run_coupling_impl(Trap& trap, const DoubleWellSpec& spec,
                                         TwoBodyState st, double e_init,
                                         const CouplingRunConfig& cfg) {
    HarmonicCouplingResult res;
    res.E_init = e_init;
    res.tau_ex = exchange_time(spec.species_a, spec.species_b, spec.omega_a, spec.omega_b,
                               spec.s0());
    const double duration =
        (cfg.duration_override > 0.0) ? cfg.duration_override : cfg.duration_factor * res.tau_ex;
    const double f_max = std::max(spec.omega_a, spec.omega_b) / (2.0 * constants::pi);
    const double dt = (cfg.integ.dt > 0.0) ? cfg.integ.dt : IntegratorConfig::default_dt(f_max);
    const auto n_steps = static_cast<std::int64_t>(std::ceil(duration / dt));

    TwoBodyParams p = two_body_params(spec, cfg.integ);
    const std::int64_t stride = std::max<std::int64_t>(1, cfg.energy_stride);
    const std::int64_t trace_every =
        std::max<std::int64_t>(1, cfg.trace_stride / stride) * stride;
    double e_min = e_init > 0 ? e_init : 0.0;
    double t_min = 0.0, e_last = 0.0;
    auto probe = [&](std::int64_t step, const TwoBodyState& s) {
        const TwoBodyEnergies e = two_body_energies(trap, p, s);
        if (e.E_a < e_min) {
            e_min = e.E_a;
            t_min = s.t;
        }
        e_last = e.E_a;
        if (cfg.record_trace && (step % trace_every == 0 || step == n_steps))
            res.trace.push_back(
                {s.t, s.z_a, s.v_a, e.E_a, s.z_b, s.v_b, e.E_b, e.E_int, e.E_total});
    };

    res.outcome = integrate_two_body(trap, p, st, dt, n_steps, probe, stride);
    res.E_fin = e_min;
    res.t_min = t_min;
    res.E_a_last = e_last;
    res.transfer_fraction = (e_init > 0.0) ? 1.0 - e_min / e_init : 0.0;
    return res;
}

}  // namespace

HarmonicCouplingResult run_harmonic_coupling(const ComposedPotential& pot,
                                             const DoubleWellSpec& spec, double e_init,
                                             const CouplingRunConfig& cfg) {
    const double f_max = std::max(spec.omega_a, spec.omega_b) / (2.0 * constants::pi);
    const double dt = (cfg.integ.dt > 0.0) ? cfg.integ.dt : IntegratorConfig::default_dt(f_max);
    TwoBodyState st = initialize_in_potential(pot, spec, e_init, cfg.phases, cfg.coolant, dt);
    StaticPotentialTrap trap(&pot, spec);
    return run_coupling_impl(trap, spec, st, e_init, cfg);
}

HarmonicCouplingResult run_harmonic_coupling_synthetic(const DoubleWellSpec& spec, double e_init,
                                                       const CouplingRunConfig& cfg) {
    using namespace constants;
    HarmonicPairTrap trap(spec.species_a.mass, spec.omega_a, spec.z_a0, spec.species_b.mass,
                          spec.omega_b, spec.z_b0);
    TwoBodyState st;
    const double k_a = spec.species_a.mass * spec.omega_a * spec.omega_a;
    const double amp_a = std::sqrt(2.0 * e_init / k_a);
    const double th_a = 2.0 * pi * cfg.phases.phase_u;
    st.z_a = spec.z_a0 + amp_a * std::sin(th_a);
    st.v_a = amp_a * spec.omega_a * std::cos(th_a);
    const double e_b = cfg.coolant.zero_energy ? 0.0 : 0.5 * hbar * spec.omega_b;
    const double amp_b =
        std::sqrt(2.0 * e_b / (spec.species_b.mass * spec.omega_b * spec.omega_b));
    const double th_b = 2.0 * pi * cfg.phases.be_phase_u;
    st.z_b = spec.z_b0 + amp_b * std::sin(th_b);
    st.v_b = amp_b * spec.omega_b * std::cos(th_b);
    return run_coupling_impl(trap, spec, st, e_init, cfg);
}

double harmonic_boundary_bisect(const std::function<bool(double)>& cooled, double depth_K,
                                double threshold_K, double rel_resolution) {
    double lo = threshold_K;
    if (!cooled(lo))
        throw std::runtime_error(
            "harmonic_boundary: threshold unreachable even at threshold-scale energy "
            "(resonance condition broken)");
    double hi = 0.98 * depth_K;
    if (hi <= lo) return lo;
    if (cooled(hi)) return hi;
    while (hi - lo > rel_resolution * hi) {
        const double mid = 0.5 * (lo + hi);
        if (cooled(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

double harmonic_boundary(const ComposedPotential& pot, const DoubleWellSpec& spec,
                         double threshold_K, double rel_resolution, CouplingRunConfig cfg) {
    using namespace constants;
    const double dir = (spec.z_b0 > spec.z_a0) ? +1.0 : -1.0;
    const WellInfo well = characterize_well(pot, spec.z_a0, spec.species_a.charge,
                                            spec.species_a.mass, dir);
    auto cooled = [&](double e_init_K) {
        try {
            const HarmonicCouplingResult r =
                run_harmonic_coupling(pot, spec, kelvin_to_joules(e_init_K), cfg);
            return r.outcome == RunOutcome::completed &&
                   joules_to_kelvin(r.E_fin) < threshold_K;
        } catch (const UntrappedError&) {
            return false;
        }
    };
    return harmonic_boundary_bisect(cooled, well.depth_K, threshold_K, rel_resolution);
}

// ---------------------------------------------------------------------------
// Sweep schedule construction
// ---------------------------------------------------------------------------

namespace {

SweepSchedule solve_waypoints(const DoubleWellSpec& spec, const ElectrodeBasis& basis,
                              std::vector<double> times, std::vector<double> f_be) {
    if (times.size() != f_be.size() || times.size() < 2)
        throw SolverError("build_sweep: need at least two waypoints");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] <= times[i - 1])
            throw SolverError("build_sweep: waypoint times must be strictly increasing");
        if (f_be[i] <= f_be[i - 1])
            throw SolverError("build_sweep: waypoint frequencies must be strictly monotone");
    }
    SweepSchedule s;
    s.base_spec = spec;
    s.times = std::move(times);
    s.f_be = std::move(f_be);
    s.voltages.reserve(s.f_be.size());
    s.potentials.reserve(s.f_be.size());
    for (std::size_t i = 0; i < s.f_be.size(); ++i) {
        DoubleWellSpec w = spec;
        w.omega_b = 2.0 * constants::pi * s.f_be[i];
        try {
            VoltageSet v = solve_double_well(w, basis);
            s.potentials.push_back(basis.compose(v.voltages));
            s.voltages.push_back(std::move(v));
        } catch (const std::exception& e) {
            throw SolverError("build_sweep: waypoint " + std::to_string(i) + " (" +
                              std::to_string(s.f_be[i]) + " Hz): " + e.what());
        }
    }
    return s;
}

}  // namespace

SweepSchedule build_sweep_from_waypoints(const DoubleWellSpec& spec, const ElectrodeBasis& basis,
                                         const std::vector<double>& times,
                                         const std::vector<double>& f_be) {
    return solve_waypoints(spec, basis, times, f_be);
}

SweepSchedule build_sweep(const DoubleWellSpec& spec, const ElectrodeBasis& basis, double f_start,
                          double f_end, double total_duration, int n_waypoints,
                          const SweepShape& shape) {
    using namespace constants;
    if (!(f_start > f_end) || f_end <= 0.0)
        throw SolverError("build_sweep: need f_start > f_end > 0");
    if (total_duration <= 0.0) throw SolverError("build_sweep: duration must be positive");

    if (n_waypoints < 4) {
        // single linear voltage ramp
        return solve_waypoints(spec, basis, {0.0, total_duration}, {f_end, f_start});
    }

    // Measure the particle's frequency-energy curve in the top-of-sweep
    // potential; the waypoint ladder follows it so each energy is crossed at
    // a rate the coupling can hold.
    DoubleWellSpec top = spec;
    top.omega_b = 2.0 * pi * f_start;
    const VoltageSet v_top = solve_double_well(top, basis);
    const ComposedPotential pot_top = basis.compose(v_top.voltages);
    const double dir = (spec.z_b0 > spec.z_a0) ? +1.0 : -1.0;
    const WellInfo well =
        characterize_well(pot_top, spec.z_a0, spec.species_a.charge, spec.species_a.mass, dir);

    auto f_at = [&](double e_K) {
        return axial_frequency_at_energy(pot_top, spec.species_a, well.z_min,
                                         kelvin_to_joules(e_K));
    };

    bool ladder_ok = true;
    double e_top = 0.97 * well.depth_K;
    try {
        if (f_at(e_top) < f_end) {
            double lo = shape.e_floor_K, hi = e_top;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (f_at(mid) > f_end)
                    lo = mid;
                else
                    hi = mid;
            }
            e_top = lo;
        }
        if (e_top <= 2.0 * shape.e_floor_K) ladder_ok = false;
    } catch (const std::exception&) {
        ladder_ok = false;
    }

    std::vector<double> times, freqs;
    if (ladder_ok) {
        const int n_ladder = n_waypoints - 1;
        std::vector<double> e(n_ladder), f(n_ladder), tau(n_ladder);
        const double ratio = shape.e_floor_K / e_top;
        bool monotone = true;
        for (int k = 0; k < n_ladder; ++k) {
            e[k] = e_top * std::pow(ratio, static_cast<double>(k) / (n_ladder - 1));
            f[k] = f_at(e[k]);
            if (k > 0 && f[k] <= f[k - 1]) monotone = false;
        }
        if (monotone) {
            // cumulative capture time dt ∝ dE / E^p
            const double p = shape.exponent;
            tau[0] = 0.0;
            for (int k = 1; k < n_ladder; ++k) {
                const double a = e[k], b = e[k - 1];
                tau[k] = tau[k - 1] + (std::pow(b, 1.0 - p) - std::pow(a, 1.0 - p)) / (1.0 - p);
            }
            const double t_knee = (1.0 - shape.tail_fraction) * total_duration;
            times.resize(n_ladder);
            freqs.resize(n_ladder);
            for (int k = 0; k < n_ladder; ++k) {
                times[k] = t_knee * tau[k] / tau[n_ladder - 1];
                freqs[k] = std::clamp(f[k], f_end, f_start);
            }
            times.push_back(total_duration);
            freqs.push_back(f_start);
            // de-duplicate any clipped plateau at the range edges
            std::vector<double> t2, f2;
            for (std::size_t i = 0; i < times.size(); ++i) {
                if (!f2.empty() && freqs[i] <= f2.back() + 1e-9) continue;
                if (!t2.empty() && times[i] <= t2.back() + 1e-12) continue;
                t2.push_back(times[i]);
                f2.push_back(freqs[i]);
            }
            if (t2.size() >= 2 && f2.front() > f_end + 1.0) {
                // fast pre-segment through frequencies no trapped particle
                // occupies, keeping the advertised range
                const double dt0 = 0.5 * t2.front();
                t2.insert(t2.begin(), 0.0);
                f2.insert(f2.begin(), f_end);
                if (t2[1] <= 0.0) t2[1] = dt0 > 0 ? dt0 : 1e-4 * total_duration;
            }
            if (std::abs(t2.front()) > 1e-15) {
                t2.front() = 0.0;
            }
            times = std::move(t2);
            freqs = std::move(f2);
            if (times.size() < 2) ladder_ok = false;
        } else {
            ladder_ok = false;
        }
    }
    if (!ladder_ok) {
        // fall back to a rate ∝ 1/f^2 ramp (f^3 linear in time)
        times.clear();
        freqs.clear();
        const double f3s = f_end * f_end * f_end, f3e = f_start * f_start * f_start;
        for (int k = 0; k < n_waypoints; ++k) {
            const double x = static_cast<double>(k) / (n_waypoints - 1);
            times.push_back(x * total_duration);
            freqs.push_back(std::cbrt(f3s + (f3e - f3s) * x));
        }
    }
    return solve_waypoints(spec, basis, times, freqs);
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

void SweepTrap::prepare(double t) {
    const std::vector<double>& ts = sched_->times;
    const std::size_t n = ts.size();
    if (t <= ts.front()) {
        seg_ = 0;
    } else if (t >= ts.back()) {
        seg_ = n - 2;
    } else {
        while (seg_ + 2 < n && t > ts[seg_ + 1]) ++seg_;
        while (seg_ > 0 && t < ts[seg_]) --seg_;
    }
    double w = (t - ts[seg_]) / (ts[seg_ + 1] - ts[seg_]);
    w = std::clamp(w, 0.0, 1.0);
    scratch_.lerp_from(waypoints_[seg_], waypoints_[seg_ + 1], w);
    if (noise_) scratch_.add_coefficients(*noise_);
}

void SweepTrap::refresh_minima() {
    z_a_cache_ = locate_minimum(scratch_, z_a_cache_, qa(), 60e-6);
    z_b_cache_ = locate_minimum(scratch_, z_b_cache_, qb(), 60e-6);
    phi_a_ = scratch_.value(z_a_cache_);
    phi_b_ = scratch_.value(z_b_cache_);
}

SweepResult run_sweep(const SweepSchedule& sched, double e_init, const SweepRunConfig& cfg,
                      const std::vector<double>* noise_coeffs) {
    using namespace constants;
    SweepResult res;
    res.E_init = e_init;
    const DoubleWellSpec& spec = sched.base_spec;
    const double f_max =
        std::max(spec.omega_a / (2.0 * pi), sched.f_be.back());
    const double dt = (cfg.integ.dt > 0.0) ? cfg.integ.dt : IntegratorConfig::default_dt(f_max);
    const auto n_steps = static_cast<std::int64_t>(std::ceil(sched.duration() / dt));

    if (cfg.n_sweeps <= 0) {  // degenerate zero-length run
        res.E_fin = e_init;
        return res;
    }

    SweepTrap trap(&sched, noise_coeffs);
    TwoBodyParams p = two_body_params(spec, cfg.integ);

    // initialization in the (possibly noise-shifted) start-of-sweep potential
    TwoBodyState st;
    try {
        st = initialize_in_potential(trap.current(), spec, e_init, cfg.phases, cfg.coolant, dt);
    } catch (const UntrappedError&) {
        res.outcome = RunOutcome::escaped;
        res.E_fin = e_init;
        return res;
    }

    for (int sweep = 0; sweep < cfg.n_sweeps; ++sweep) {
        if (sweep > 0) {
            // coolant reinitialized to the ground state at the start potential
            trap.prepare(0.0);
            trap.refresh_minima();
            const double curv_b =
                spec.species_b.charge * trap.current().eval(trap.z_min_b(), 2);
            const double omega_b = std::sqrt(curv_b / spec.species_b.mass);
            const double e_b = cfg.coolant.zero_energy ? 0.0 : 0.5 * hbar * omega_b;
            const double amp =
                e_b > 0 ? std::sqrt(2.0 * e_b / (spec.species_b.mass * omega_b * omega_b)) : 0.0;
            const double th = 2.0 * pi * cfg.be_phase_u2;
            st.z_b = trap.z_min_b() + amp * std::sin(th);
            st.v_b = amp * omega_b * std::cos(th);
        }
        st.t = 0.0;
        trap.prepare(0.0);

        RunOutcome out;
        if (cfg.record_trace) {
            auto probe = [&](std::int64_t step, const TwoBodyState& s) {
                if (step % cfg.trace_stride == 0 || step == n_steps) {
                    trap.refresh_minima();
                    const TwoBodyEnergies e = two_body_energies(trap, p, s);
                    res.trace.push_back({s.t + sweep * sched.duration(), s.z_a, s.v_a, e.E_a,
                                         s.z_b, s.v_b, e.E_b, e.E_int, e.E_total});
                }
            };
            out = integrate_two_body(trap, p, st, dt, n_steps, probe, cfg.trace_stride);
        } else {
            out = integrate_two_body(trap, p, st, dt, n_steps);
        }
        if (out != RunOutcome::completed) {
            res.outcome = out;
            res.E_fin = e_init;
            return res;
        }
    }

    trap.prepare(sched.duration());
    trap.refresh_minima();
    const TwoBodyEnergies e = two_body_energies(trap, p, st);
    res.E_fin = e.E_a;
    res.outcome = RunOutcome::completed;
    return res;
}

double quartic_target_for_slope(const ParticleSpecies& sp, double f_particle,
                                double slope_hz_per_K) {
    using namespace constants;
    // df/dE = 3 beta f0 / k^2 * ... inverted: beta = S k^2 / (3 f0 kB) with
    // U = k z^2/2 + beta z^4 and E in kelvin units absorbed through kB
    const double k = sp.mass * std::pow(2.0 * pi * f_particle, 2);
    const double beta = slope_hz_per_K * k * k / (3.0 * f_particle * k_boltzmann);
    return 24.0 * beta / sp.charge;
}

SweepStageParams default_sweep_stage(SpeciesLabel label) {
    SweepStageParams p;
    if (label == SpeciesLabel::antiproton) {
        p.duration = 0.242;
        p.slope_hz_per_K = -2000.0;
    }
    return p;
}

DoubleWellSpec sweep_spec_for(const SweepStageParams& p, SpeciesLabel label) {
    const ParticleSpecies a = species(label);
    const ParticleSpecies b = species(SpeciesLabel::beryllium9_ion);
    const double quartic = quartic_target_for_slope(a, p.f_particle, p.slope_hz_per_K);
    // the coolant-well frequency target is replaced waypoint by waypoint
    return make_double_well_spec(a, b, p.f_particle, p.f_particle, p.s0, p.delta_s0, true,
                                 quartic);
}

// ---------------------------------------------------------------------------
// Protocol plan
// ---------------------------------------------------------------------------

namespace {

int repetitions_for(double e_start_K, double e_target_K, double efficiency) {
    // smallest k with E_start * (1-p)^k <= E_target
    const double k = std::log(e_target_K / e_start_K) / std::log(1.0 - efficiency);
    return std::max(1, static_cast<int>(std::ceil(k - 1e-9)));
}

}  // namespace

ProtocolPlan plan_ground_state_protocol(SpeciesLabel label, double transfer_efficiency) {
    using namespace constants;
    if (label != SpeciesLabel::proton && label != SpeciesLabel::antiproton)
        throw std::invalid_argument("plan_ground_state_protocol: species must be (anti-)proton");
    const ParticleSpecies a = species(label);
    const ParticleSpecies b = species(SpeciesLabel::beryllium9_ion);
    const bool is_proton = (label == SpeciesLabel::proton);

    ProtocolPlan plan;
    plan.species = label;
    plan.transfer_efficiency = transfer_efficiency;

    // Stage parameter sets; the sweep durations are protocol constants, the
    // static-stage times follow from the exchange time at the stage settings.
    ProtocolStage sweep;
    sweep.kind = StageKind::sweep;
    sweep.f_particle = 500e3;
    sweep.f_be_lo = 470e3;
    sweep.f_be_hi = 500e3;
    sweep.s0 = 0.7e-3;
    sweep.repetitions = 2;
    sweep.duration_per_rep = is_proton ? 0.180 : 0.242;
    sweep.e_start_K = 4.0;
    sweep.e_target_K = is_proton ? 0.46 : 0.26;

    ProtocolStage harm;
    harm.kind = StageKind::harmonic;
    harm.f_particle = is_proton ? 400e3 : 450e3;
    harm.s0 = is_proton ? 0.7e-3 : 0.6e-3;
    {
        const double w = 2.0 * pi * harm.f_particle;
        const double dw = coulomb_detuning(a, b, w, harm.s0);
        harm.f_be_lo = harm.f_be_hi = harm.f_particle + dw / (2.0 * pi);
        harm.tau_ex = exchange_time(a, b, w, w + dw, harm.s0);
    }
    harm.duration_per_rep = harm.tau_ex;
    harm.e_start_K = sweep.e_target_K;
    harm.e_target_K = 1e-3;
    harm.repetitions = repetitions_for(harm.e_start_K, harm.e_target_K, transfer_efficiency);

    ProtocolStage ground;
    ground.kind = StageKind::ground_state;
    ground.f_particle = 100e3;
    ground.s0 = 0.6e-3;
    {
        const double w = 2.0 * pi * ground.f_particle;
        const double dw = coulomb_detuning(a, b, w, ground.s0);
        ground.f_be_lo = ground.f_be_hi = ground.f_particle + dw / (2.0 * pi);
        ground.tau_ex = exchange_time(a, b, w, w + dw, ground.s0);
    }
    ground.duration_per_rep = ground.tau_ex;
    ground.e_start_K = harm.e_target_K;
    // "ground state": within a couple of motional quanta
    ground.e_target_K = 2.0 * hbar * (2.0 * pi * ground.f_particle) / k_boltzmann;
    ground.repetitions =
        repetitions_for(ground.e_start_K, ground.e_target_K, transfer_efficiency);

    plan.stages = {sweep, harm, ground};
    plan.total_time = 0.0;
    plan.total_time_rounded = 0.0;
    for (const ProtocolStage& s : plan.stages) {
        plan.total_time += s.repetitions * s.duration_per_rep;
        const double rounded = std::round(s.duration_per_rep * 1e4) / 1e4;  // 0.1 ms
        plan.total_time_rounded += s.repetitions * rounded;
    }
    return plan;
}

std::string format_protocol_plan(const ProtocolPlan& plan) {
    std::ostringstream os;
    os << "ground-state cooling plan for " << species_name(plan.species)
       << " (transfer efficiency " << plan.transfer_efficiency * 100 << "%)\n";
    os << "  stage         f_part[kHz]  f_Be[kHz]          s0[mm]  reps  t/rep[ms]  target\n";
    for (const ProtocolStage& s : plan.stages) {
        const char* kind = s.kind == StageKind::sweep        ? "sweep"
                           : s.kind == StageKind::harmonic   ? "harmonic"
                                                             : "ground-state";
        char fbe[64];
        if (s.f_be_lo != s.f_be_hi)
            std::snprintf(fbe, sizeof fbe, "%.0f-%.0f", s.f_be_lo / 1e3, s.f_be_hi / 1e3);
        else
            std::snprintf(fbe, sizeof fbe, "%.3f", s.f_be_lo / 1e3);
        char line[256];
        std::snprintf(line, sizeof line, "  %-13s %10.0f  %-17s %6.1f  %4d  %9.4f  ", kind,
                      s.f_particle / 1e3, fbe, s.s0 * 1e3, s.repetitions,
                      s.duration_per_rep * 1e3);
        os << line;
        if (s.kind == StageKind::ground_state)
            os << "ground state\n";
        else
            os << "< " << s.e_target_K * 1e3 << " mK\n";
    }
    os << "  total time (excluding coolant reinitialization): " << plan.total_time * 1e3
       << " ms\n";
    return os.str();
}

}  // namespace dwsim
