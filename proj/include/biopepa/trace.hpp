#pragma once

#include <string>
#include <vector>

#include "biopepa/diagnostics.hpp"

namespace biopepa {

/// Grid-sampled ensemble statistics: per-species mean and unbiased variance of
/// the molecule count at each grid time, over `runs` independent simulations.
struct EnsembleTrace {
  std::vector<double> times;                       // strictly increasing
  std::vector<std::string> species;                // "name@location"
  std::vector<std::vector<double>> mean;           // [species][time]
  std::vector<std::vector<double>> variance;       // [species][time]
  int runs = 0;

  int species_index(const std::string& name) const;
  std::size_t points() const { return times.size(); }

  /// Step-function value of the mean at time t (value of the last grid point
  /// at or before t; first point before the grid starts).
  double mean_at(int species_idx, double t) const;

  /// max over the grid of mean + 3 * stderr(mean); the "simulation-derived
  /// maximum amount" used to bound level counts.
  double derived_max(int species_idx) const;
};

/// CSV with header `time,<species>...`; 17 significant digits.
void write_trace_csv(const EnsembleTrace& trace, const std::string& path);
EnsembleTrace read_trace_csv(const std::string& path);

}  // namespace biopepa
