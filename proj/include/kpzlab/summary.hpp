#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace kpzlab {

// Flat key=value configuration. Values stay strings; typed access validates.
class Config {
public:
  Config() = default;
  explicit Config(std::map<std::string, std::string> defaults) : values_(std::move(defaults)) {}

  void load_file(const std::filesystem::path& path);  // '#' comments, blank lines ignored
  void set(const std::string& assignment);            // "key=value"
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string str(const std::string& key) const;
  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;  // comma separated
  std::vector<long> integers(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

struct ScalarResult {
  std::string name;
  double value = 0;
  double stderr_ = 0;
  double target = 0;
  double tolerance = 0;  // reported alongside the acceptance interval
  double lo = 0, hi = 0;
  bool gating = true;
  bool pass() const { return value >= lo && value <= hi; }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct EnsembleSummary {
  std::string experiment;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;
  std::vector<ScalarResult> results;
  std::map<std::string, Table> tables;
  std::string main_table;

  void add(ScalarResult r) { results.push_back(std::move(r)); }
  bool passed() const;
  const ScalarResult& result(const std::string& name) const;
};

// Writes <experiment>-<seed>.json, <experiment>-<seed>.csv (main table) and
// <experiment>-<seed>.<table>.csv for any further tables. Returns file paths.
std::vector<std::filesystem::path> emit(const EnsembleSummary& s, const std::filesystem::path& dir);

std::string to_json(const EnsembleSummary& s);
std::string to_csv(const Table& t);

}  // namespace kpzlab
