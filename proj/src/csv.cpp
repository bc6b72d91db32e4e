#include "fskmc/csv.hpp"

#include <array>
#include <charconv>

#include "fskmc/errors.hpp"

namespace fskmc {

std::string format_number(double x) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

void write_trajectory_header(std::ostream& out) { out << "scheme,dt,q,N,K,time,observable,mean,stderr\n"; }

void write_trajectory_rows(std::ostream& out, const TrajectoryStats& stats) {
    const std::string prefix = stats.scheme + ',' + format_number(stats.dt) + ',' + std::to_string(stats.q) + ',' +
                               std::to_string(stats.sites) + ',' + std::to_string(stats.samples) + ',';
    for (const auto& s : stats.series) {
        const std::string name = s.observable.name();
        for (std::size_t k = 0; k < stats.times.size(); ++k) {
            out << prefix << format_number(stats.times[k]) << ',' << name << ',' << format_number(s.mean[k]) << ','
                << format_number(s.stderr_[k]) << '\n';
        }
    }
}

void write_sweep_header(std::ostream& out) { out << "scheme,parameter,value,observable,weak_error,stderr\n"; }

void write_sweep_rows(std::ostream& out, const SweepResult& sweep) {
    const std::string name = sweep.observable.name();
    for (const auto& p : sweep.points) {
        out << sweep.scheme << ',' << sweep.parameter << ',' << format_number(p.value) << ',' << name << ','
            << format_number(p.weak_error) << ',' << format_number(p.stderr_) << '\n';
    }
}

void write_oracle_csv(std::ostream& out, std::span<const double> times, const std::string& observable,
                      std::span<const double> exact, std::span<const double> splitting, const std::string& scheme) {
    if (exact.size() != times.size() || (!splitting.empty() && splitting.size() != times.size())) {
        throw UsageError("write_oracle_csv: column lengths differ");
    }
    out << "time,observable,exact";
    if (!splitting.empty()) out << ',' << scheme;
    out << '\n';
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << format_number(times[k]) << ',' << observable << ',' << format_number(exact[k]);
        if (!splitting.empty()) out << ',' << format_number(splitting[k]);
        out << '\n';
    }
}

}  // namespace fskmc
