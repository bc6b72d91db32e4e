#pragma once

#include <ostream>
#include <span>
#include <string>

#include "fskmc/harness.hpp"

namespace fskmc {

/// Shortest decimal that round-trips the double.
std::string format_number(double x);

/// Header `scheme,dt,q,N,K,time,observable,mean,stderr`.
void write_trajectory_header(std::ostream& out);
void write_trajectory_rows(std::ostream& out, const TrajectoryStats& stats);

/// Header `scheme,parameter,value,observable,weak_error,stderr`.
void write_sweep_header(std::ostream& out);
void write_sweep_rows(std::ostream& out, const SweepResult& sweep);

/// Header `time,observable,exact` or, with a splitting curve,
/// `time,observable,exact,<scheme>`.
void write_oracle_csv(std::ostream& out, std::span<const double> times, const std::string& observable,
                      std::span<const double> exact, std::span<const double> splitting = {},
                      const std::string& scheme = {});

}  // namespace fskmc
