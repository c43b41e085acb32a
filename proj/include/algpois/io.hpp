#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "algpois/hamilton.hpp"

namespace algpois {

// Shortest exact round trip is not required; 17 significant digits always.
std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // ConfigError when absent
  std::vector<double> values(const std::string& name) const;
  void add_column(const std::string& name, const std::vector<double>& values);
};

// t, state columns, then optional monitor column H.
Table trajectory_table(const Trajectory& traj, const SmoothMap* H = nullptr);

void write_csv(std::ostream& os, const Table& t);
void write_csv(const std::string& path, const Table& t);
Table read_csv(const std::string& path);

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};
std::string render_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<SvgSeries>& series, int width = 640, int height = 480);
void write_text(const std::string& path, const std::string& text);

// Comma separated numbers, e.g. "1,-1,0.5".
std::vector<double> parse_number_list(const std::string& text);

// ALGPOIS_SEED when set, else the configured seed.
std::uint64_t resolve_seed(std::uint64_t configured);

}  // namespace algpois
