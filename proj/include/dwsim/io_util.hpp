#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "dwsim/montecarlo.hpp"
#include "dwsim/protocols.hpp"

namespace dwsim {

// shortest round-trip formatting keeps rewritten outputs byte-identical
std::string fmt_g17(double v);

std::uint64_t fnv1a_hash(const std::string& s);

void write_trajectory_csv(const std::string& path, const std::vector<TracePoint>& trace);

void write_samples_csv(const std::string& path, const EnergyDistribution& dist);

void write_histogram_csv(const std::string& path, const EnergyDistribution& dist);

void write_potential_csv(const std::string& path, const ComposedPotential& pot, int n_points);

void write_schedule_csv(const std::string& path, const SweepSchedule& sched);

// minimal standalone line plot; the provenance comment carries a config hash
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<double>& x,
                    const std::vector<std::pair<std::string, std::vector<double>>>& series,
                    const std::string& x_label, const std::string& y_label,
                    std::uint64_t config_hash, bool log_y = false);

}  // namespace dwsim
