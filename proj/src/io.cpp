#include "ncbm/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ncbm {

std::string format_g12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%#.12g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& token, const std::string& path, int line,
                    const char* field) {
  const std::string t = trim(token);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    std::ostringstream msg;
    msg << path << ": line " << line << ": field '" << field << "' is not a number: '" << token
        << "'";
    throw ParseError(msg.str());
  }
  return v;
}

long long parse_int(const std::string& token, const std::string& path, int line,
                    const char* field) {
  const std::string t = trim(token);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) {
    std::ostringstream msg;
    msg << path << ": line " << line << ": field '" << field << "' is not an integer: '" << token
        << "'";
    throw ParseError(msg.str());
  }
  return v;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path);
  out << content;
}

std::vector<ConfigEntry> parse_config_file(const std::string& path) {
  const std::string content = read_file(path);
  std::vector<ConfigEntry> entries;
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << path << ": line " << lineno << ": expected 'key = value', got '" << stripped << "'";
      throw ParseError(msg.str());
    }
    ConfigEntry entry;
    entry.key = trim(stripped.substr(0, eq));
    entry.value = trim(stripped.substr(eq + 1));
    entry.line = lineno;
    if (entry.key.empty()) {
      std::ostringstream msg;
      msg << path << ": line " << lineno << ": empty key";
      throw ParseError(msg.str());
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<TrafficRecord> parse_traffic_log(const std::string& path) {
  const std::string content = read_file(path);
  std::istringstream in(content);
  std::string line;
  std::vector<TrafficRecord> records;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    if (!header_seen) {
      if (stripped.rfind("node_id,", 0) != 0) {
        std::ostringstream msg;
        msg << path << ": line " << lineno << ": expected the header row starting with 'node_id,'";
        throw ParseError(msg.str());
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(stripped);
    if (fields.size() != 8) {
      std::ostringstream msg;
      msg << path << ": line " << lineno << ": expected 8 fields, got " << fields.size();
      throw ParseError(msg.str());
    }
    TrafficRecord rec;
    rec.node_id = trim(fields[0]);
    if (rec.node_id.empty()) {
      std::ostringstream msg;
      msg << path << ": line " << lineno << ": empty node_id";
      throw ParseError(msg.str());
    }
    rec.interval_index = parse_int(fields[1], path, lineno, "interval");
    rec.pkts_forwarded = parse_double(fields[2], path, lineno, "pkts_forwarded");
    rec.pkts_received = parse_double(fields[3], path, lineno, "pkts_received");
    rec.remaining_power = parse_double(fields[4], path, lineno, "remaining_power");
    rec.power_consumption_rate = parse_double(fields[5], path, lineno, "power_consumption_rate");
    rec.initial_energy = parse_double(fields[6], path, lineno, "initial_energy");
    const std::string durations = trim(fields[7]);
    if (!durations.empty()) {
      std::istringstream ds(durations);
      std::string token;
      while (std::getline(ds, token, ';'))
        rec.recovery_durations.push_back(parse_double(token, path, lineno, "recovery_durations"));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<MemberSpec> parse_member_file(const std::string& path) {
  const std::string content = read_file(path);
  std::istringstream in(content);
  std::string line;
  std::vector<MemberSpec> members;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    if (!header_seen) {
      if (stripped.rfind("node_id,", 0) != 0) {
        std::ostringstream msg;
        msg << path << ": line " << lineno << ": expected the header row starting with 'node_id,'";
        throw ParseError(msg.str());
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(stripped);
    if (fields.size() != 6) {
      std::ostringstream msg;
      msg << path << ": line " << lineno << ": expected 6 fields (node_id,a,b,c,d,e), got "
          << fields.size();
      throw ParseError(msg.str());
    }
    MemberSpec m;
    m.node_id = trim(fields[0]);
    m.a = parse_double(fields[1], path, lineno, "a");
    m.b = parse_double(fields[2], path, lineno, "b");
    m.c = parse_double(fields[3], path, lineno, "c");
    m.d = parse_double(fields[4], path, lineno, "d");
    m.e = parse_double(fields[5], path, lineno, "e");
    members.push_back(std::move(m));
  }
  if (members.empty()) throw ParseError(path + ": no member rows found");
  return members;
}

std::string matrix_file_content(const Mat4& m, const std::string& metadata_line,
                                const std::array<const char*, 4>& state_names) {
  std::ostringstream out;
  out << metadata_line << "\n";
  out << "# states:";
  for (const char* s : state_names) out << ' ' << s;
  out << "\n";
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (j) out << ' ';
      out << format_g12(m[i][j]);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace ncbm
