#include "biopepa/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace biopepa {

int EnsembleTrace::species_index(const std::string& name) const {
  for (std::size_t i = 0; i < species.size(); ++i)
    if (species[i] == name) return static_cast<int>(i);
  return -1;
}

double EnsembleTrace::mean_at(int species_idx, double t) const {
  const auto& m = mean[species_idx];
  // last grid point at or before t
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t i = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  return m[i];
}

double EnsembleTrace::derived_max(int species_idx) const {
  double best = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double se = runs > 0 ? std::sqrt(std::max(variance[species_idx][i], 0.0) / runs) : 0.0;
    best = std::max(best, mean[species_idx][i] + 3.0 * se);
  }
  return best;
}

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}
}  // namespace

void write_trace_csv(const EnsembleTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "time";
  for (const auto& s : trace.species) out << "," << s;
  out << "\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    out << fmt(trace.times[i]);
    for (std::size_t s = 0; s < trace.species.size(); ++s) out << "," << fmt(trace.mean[s][i]);
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path);
}

EnsembleTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  EnsembleTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty trace file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::stringstream header(line);
    std::string cell;
    bool first = true;
    while (std::getline(header, cell, ',')) {
      if (first) {
        if (cell != "time") throw IoError(path + ": first column must be 'time'");
        first = false;
      } else {
        trace.species.push_back(cell);
      }
    }
  }
  trace.mean.resize(trace.species.size());
  trace.variance.resize(trace.species.size());
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(row, cell, ',')) {
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str())
        throw IoError(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      if (col == 0)
        trace.times.push_back(v);
      else if (col - 1 < trace.mean.size())
        trace.mean[col - 1].push_back(v);
      ++col;
    }
    if (col != trace.species.size() + 1)
      throw IoError(path + ":" + std::to_string(lineno) + ": wrong column count");
  }
  for (auto& v : trace.variance) v.assign(trace.times.size(), 0.0);
  trace.runs = 1;  // variances are not stored in CSV form
  return trace;
}

}  // namespace biopepa
