#include "kpzlab/summary.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifndef KPZLAB_CXX_FLAGS
#define KPZLAB_CXX_FLAGS ""
#endif

namespace kpzlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip
  return std::string(buf, p);
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    if (line.find('=') == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(n) + " is not key=value");
    set(line);
  }
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("config: expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
  // type check against the default's shape
  const std::string& def = it->second;
  auto numeric = [](const std::string& s) {
    for (auto& part : split(s, ',')) {
      double d;
      auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), d);
      if (ec != std::errc() || p != part.data() + part.size()) return false;
    }
    return !s.empty();
  };
  if (numeric(def) && !numeric(value))
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + value + "'");
  it->second = value;
}

std::string Config::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("config: missing key '" + key + "'");
  return it->second;
}

double Config::real(const std::string& key) const {
  const auto s = str(key);
  double d;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("config: key '" + key + "' is not a number");
  return d;
}

long Config::integer(const std::string& key) const {
  const double d = real(key);
  if (d != std::floor(d)) throw std::invalid_argument("config: key '" + key + "' must be an integer");
  return static_cast<long>(d);
}

std::vector<double> Config::reals(const std::string& key) const {
  std::vector<double> out;
  for (auto& part : split(str(key), ',')) {
    double d;
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), d);
    if (ec != std::errc() || p != part.data() + part.size())
      throw std::invalid_argument("config: key '" + key + "' has a non-numeric entry");
    out.push_back(d);
  }
  return out;
}

std::vector<long> Config::integers(const std::string& key) const {
  std::vector<long> out;
  for (double d : reals(key)) {
    if (d != std::floor(d)) throw std::invalid_argument("config: key '" + key + "' must hold integers");
    out.push_back(static_cast<long>(d));
  }
  return out;
}

bool EnsembleSummary::passed() const {
  for (auto& r : results)
    if (r.gating && !r.pass()) return false;
  return true;
}

const ScalarResult& EnsembleSummary::result(const std::string& name) const {
  for (auto& r : results)
    if (r.name == name) return r;
  throw std::out_of_range("summary: no result '" + name + "'");
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += "\n";
  }
  return out;
}

std::string to_json(const EnsembleSummary& s) {
  nlohmann::json j;
  j["experiment"] = s.experiment;
  j["seed"] = s.seed;
  j["config"] = s.config;
  j["pass"] = s.passed();
  auto& rs = j["results"] = nlohmann::json::array();
  for (auto& r : s.results) {
    rs.push_back({{"name", r.name},
                  {"value", number(r.value)},
                  {"stderr", number(r.stderr_)},
                  {"target", number(r.target)},
                  {"tolerance", number(r.tolerance)},
                  {"lower", number(r.lo)},
                  {"upper", number(r.hi)},
                  {"gating", r.gating},
                  {"pass", r.pass()}});
  }
  auto& ts = j["tables"] = nlohmann::json::object();
  for (auto& [name, t] : s.tables) ts[name] = {{"columns", t.columns}, {"rows", t.rows.size()}};
  j["main_table"] = s.main_table;
#if defined(__clang__)
  j["build"] = {{"compiler", std::string("clang ") + __clang_version__}, {"flags", KPZLAB_CXX_FLAGS}};
#elif defined(__GNUC__)
  j["build"] = {{"compiler", std::string("gcc ") + __VERSION__}, {"flags", KPZLAB_CXX_FLAGS}};
#else
  j["build"] = {{"compiler", "unknown"}, {"flags", KPZLAB_CXX_FLAGS}};
#endif
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit(const EnsembleSummary& s, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string stem = s.experiment + "-" + std::to_string(s.seed);
  std::vector<std::filesystem::path> files;
  auto write = [&](const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("emit: cannot write " + p.string());
    out << body;
    if (!out) throw std::runtime_error("emit: write failed for " + p.string());
    files.push_back(p);
  };
  write(dir / (stem + ".json"), to_json(s));
  const Table empty;
  auto main = s.tables.find(s.main_table);
  write(dir / (stem + ".csv"), to_csv(main == s.tables.end() ? empty : main->second));
  for (auto& [name, t] : s.tables)
    if (name != s.main_table) write(dir / (stem + "." + name + ".csv"), to_csv(t));
  return files;
}

}  // namespace kpzlab
