#include "rdlab/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "rdlab/errors.hpp"

namespace rdlab {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
  out.flush();
  if (!out) throw ConfigError("write failed: " + path);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_double(const std::string& s, const std::string& path) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || (end && *end != '\0'))
    throw ConfigError("malformed numeric cell '" + s + "' in " + path);
  return v;
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::uint64_t fnv1a64_file(const std::string& path) {
  return fnv1a64(read_file(path));
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  if (header.empty()) throw ConfigError("write_csv: empty header");
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out.push_back(',');
    out += header[j];
  }
  out.push_back('\n');
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw ConfigError("write_csv: row width does not match header");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out.push_back(',');
      out += format_g17(row[j]);
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

CsvTable read_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  CsvTable table;
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("empty CSV file: " + path);
  table.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != table.header.size())
      throw ConfigError("ragged CSV row in " + path);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) row.push_back(parse_double(c, path));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_snapshots_csv(const std::string& path, const Trajectory& traj) {
  std::string out = "t,x,u\n";
  for (const FieldState& s : traj.snapshots) {
    const std::string t_str = format_g17(s.t);
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      out += t_str;
      out.push_back(',');
      out += format_g17(s.x_lab(i));
      out.push_back(',');
      out += format_g17(s.u[i]);
      out.push_back('\n');
    }
  }
  write_file(path, out);
}

void write_front_trace_csv(const std::string& path, const FrontTrace& trace,
                           double c_reference) {
  std::vector<std::vector<double>> rows;
  rows.reserve(trace.times.size());
  for (std::size_t k = 0; k < trace.times.size(); ++k)
    rows.push_back({trace.times[k], trace.m[k],
                    k < trace.mdot.size() ? trace.mdot[k] : 0.0,
                    trace.m[k] - c_reference * trace.times[k]});
  write_csv(path, {"t", "m", "mdot", "delay"}, rows);
}

FrontTrace read_front_trace_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header != std::vector<std::string>{"t", "m", "mdot", "delay"})
    throw ConfigError("not a front-trace CSV: " + path);
  FrontTrace trace;
  trace.times.reserve(table.rows.size());
  trace.m.reserve(table.rows.size());
  trace.mdot.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    trace.times.push_back(row[0]);
    trace.m.push_back(row[1]);
    trace.mdot.push_back(row[2]);
  }
  return trace;
}

void write_ledger_csv(const std::string& path,
                      const std::vector<LedgerRow>& rows) {
  std::string out = "t,name,value,tolerance,pass\n";
  for (const LedgerRow& r : rows) {
    out += format_g17(r.t);
    out.push_back(',');
    out += r.name;
    out.push_back(',');
    out += format_g17(r.value);
    out.push_back(',');
    out += format_g17(r.tolerance);
    out += r.pass ? ",1\n" : ",0\n";
  }
  write_file(path, out);
}

std::vector<LedgerRow> read_ledger_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || split_line(line) !=
                                     std::vector<std::string>{
                                         "t", "name", "value", "tolerance",
                                         "pass"})
    throw ConfigError("not a ledger CSV: " + path);
  std::vector<LedgerRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != 5) throw ConfigError("ragged ledger row in " + path);
    LedgerRow r;
    r.t = parse_double(cells[0], path);
    r.name = cells[1];
    r.value = parse_double(cells[2], path);
    r.tolerance = parse_double(cells[3], path);
    r.pass = parse_double(cells[4], path) != 0.0;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_manifest_json(const std::string& path,
                         const ExperimentManifest& manifest) {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["subcommand"] = manifest.subcommand;
  j["config_hash"] = manifest.config_hash;
  j["config"] = nlohmann::json::parse(manifest.config_echo);
  j["outputs"] = nlohmann::json::array();
  for (const ManifestOutput& o : manifest.outputs)
    j["outputs"].push_back(
        {{"path", o.path}, {"bytes", o.bytes}, {"fnv64", o.fnv64}});
  j["wall_ms"] = manifest.wall_ms;
  j["steps"] = manifest.steps;
  write_file(path, j.dump(2) + "\n");
}

ExperimentManifest read_manifest_json(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed manifest " + path + ": " + e.what());
  }
  ExperimentManifest m;
  try {
    m.subcommand = j.at("subcommand").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.config_echo = j.at("config").dump();
    for (const auto& o : j.at("outputs")) {
      ManifestOutput out;
      out.path = o.at("path").get<std::string>();
      out.bytes = o.at("bytes").get<std::uint64_t>();
      out.fnv64 = o.at("fnv64").get<std::string>();
      m.outputs.push_back(std::move(out));
    }
    m.wall_ms = j.value("wall_ms", 0.0);
    m.steps = j.value("steps", 0ll);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("incomplete manifest " + path + ": " + e.what());
  }
  return m;
}

ManifestOutput describe_output(const std::string& dir,
                               const std::string& relative_path) {
  ManifestOutput o;
  o.path = relative_path;
  const std::string full = dir.empty() ? relative_path
                                       : dir + "/" + relative_path;
  const std::string content = read_file(full);
  o.bytes = content.size();
  o.fnv64 = hex64(fnv1a64(content));
  return o;
}

}  // namespace rdlab
