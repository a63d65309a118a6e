#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ncbm/estimation.hpp"
#include "ncbm/mat4.hpp"

namespace ncbm {

// 12 significant digits, trailing zeros kept, locale-independent ("0.600000000000").
std::string format_g12(double v);

// "key = value" pairs, '#' comments, blank lines; order preserved.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<ConfigEntry> parse_config_file(const std::string& path);

// Log format (one node interval per line):
//   node_id,interval,pkts_forwarded,pkts_received,remaining_power,
//   power_consumption_rate,initial_energy,recovery_durations
// with recovery_durations a ';'-separated list (may be empty).
std::vector<TrafficRecord> parse_traffic_log(const std::string& path);

// Member spec format: node_id,a,b,c,d,e
struct MemberSpec {
  std::string node_id;
  double a, b, c, d, e;
};

std::vector<MemberSpec> parse_member_file(const std::string& path);

// Splits a simple comma-separated line; no quoting (the formats need none).
std::vector<std::string> split_csv_line(const std::string& line);

std::string read_file(const std::string& path);       // throws ParseError if unreadable
void write_file(const std::string& path, const std::string& content);

// 4 lines x 4 space-separated decimals, preceded by the metadata comment and
// a "# states: ..." comment.
std::string matrix_file_content(const Mat4& m, const std::string& metadata_line,
                                const std::array<const char*, 4>& state_names);

}  // namespace ncbm
