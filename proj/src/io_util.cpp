#include "dwsim/io_util.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace dwsim {

std::string fmt_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const std::vector<TracePoint>& trace) {
    std::ofstream out = open_out(path);
    out << "t,z_a,v_a,E_a,z_b,v_b,E_b,E_int,E_total\n";
    for (const TracePoint& p : trace)
        out << fmt_g17(p.t) << ',' << fmt_g17(p.z_a) << ',' << fmt_g17(p.v_a) << ','
            << fmt_g17(p.E_a) << ',' << fmt_g17(p.z_b) << ',' << fmt_g17(p.v_b) << ','
            << fmt_g17(p.E_b) << ',' << fmt_g17(p.E_int) << ',' << fmt_g17(p.E_total) << '\n';
}

void write_samples_csv(const std::string& path, const EnergyDistribution& dist) {
    std::ofstream out = open_out(path);
    out << "index,E_init_K,E_fin_K,outcome\n";
    for (const SampleRecord& s : dist.samples)
        out << s.index << ',' << fmt_g17(s.E_init_K) << ',' << fmt_g17(s.E_fin_K) << ','
            << outcome_name(s.outcome) << '\n';
}

void write_histogram_csv(const std::string& path, const EnergyDistribution& dist) {
    std::ofstream out = open_out(path);
    out << "bin_low_K,bin_high_K,density\n";
    for (size_t i = 0; i + 1 < dist.bin_edges_K.size(); ++i)
        out << fmt_g17(dist.bin_edges_K[i]) << ',' << fmt_g17(dist.bin_edges_K[i + 1]) << ','
            << fmt_g17(dist.density[i]) << '\n';
}

void write_potential_csv(const std::string& path, const ComposedPotential& pot, int n_points) {
    std::ofstream out = open_out(path);
    out << "z,phi,dphi,d2phi\n";
    const double lo = 0.999 * pot.z_min(), hi = 0.999 * pot.z_max();
    for (int i = 0; i < n_points; ++i) {
        const double z = lo + (hi - lo) * i / (n_points - 1);
        out << fmt_g17(z) << ',' << fmt_g17(pot.eval(z, 0)) << ',' << fmt_g17(pot.eval(z, 1))
            << ',' << fmt_g17(pot.eval(z, 2)) << '\n';
    }
}

void write_schedule_csv(const std::string& path, const SweepSchedule& sched) {
    std::ofstream out = open_out(path);
    out << "time_s,f_Be_Hz";
    for (size_t i = 0; i < sched.voltages.front().voltages.size(); ++i)
        out << ",V_" << (i + 1);
    out << '\n';
    for (size_t k = 0; k < sched.size(); ++k) {
        out << fmt_g17(sched.times[k]) << ',' << fmt_g17(sched.f_be[k]);
        for (double v : sched.voltages[k].voltages) out << ',' << fmt_g17(v);
        out << '\n';
    }
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<double>& x,
                    const std::vector<std::pair<std::string, std::vector<double>>>& series,
                    const std::string& x_label, const std::string& y_label,
                    std::uint64_t config_hash, bool log_y) {
    const int W = 860, H = 520, ML = 80, MR = 30, MT = 50, MB = 60;
    std::ofstream out = open_out(path);
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (double v : x) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
    }
    for (const auto& [name, ys] : series)
        for (double v : ys) {
            const double y = log_y ? std::log10(std::max(v, 1e-300)) : v;
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto px = [&](double v) { return ML + (v - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double v) {
        const double y = log_y ? std::log10(std::max(v, 1e-300)) : v;
        return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB);
    };
    char hashbuf[32];
    std::snprintf(hashbuf, sizeof hashbuf, "%016llx",
                  static_cast<unsigned long long>(config_hash));
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\">\n<!-- config-hash: " << hashbuf << " -->\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"25\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";
    out << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
        << H - MB << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 15
        << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
    out << "<text x=\"20\" y=\"" << (MT + H - MB) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 "
        << (MT + H - MB) / 2 << ")\">" << y_label << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4;
        const double yvv = ymin + (ymax - ymin) * i / 4;
        const double yv = log_y ? std::pow(10.0, yvv) : yvv;
        out << "<text x=\"" << px(xv) << "\" y=\"" << H - MB + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt_g17(xv).substr(0, 8)
            << "</text>\n";
        out << "<text x=\"" << ML - 8 << "\" y=\"" << H - MB - (H - MT - MB) * i / 4 + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_g17(yv).substr(0, 8)
            << "</text>\n";
    }
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    int ci = 0;
    for (const auto& [name, ys] : series) {
        out << "<polyline fill=\"none\" stroke=\"" << colors[ci % 5] << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < x.size() && i < ys.size(); ++i)
            out << px(x[i]) << ',' << py(ys[i]) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << W - MR - 10 << "\" y=\"" << MT + 18 * (ci + 1)
            << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << colors[ci % 5] << "\">"
            << name << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

}  // namespace dwsim
