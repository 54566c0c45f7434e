#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigidreg/search.hpp"

namespace rigidreg {

using ordered_json = nlohmann::ordered_json;

// FNV-1a 64 content digest for the report's input record.
std::string file_digest(const std::string& path);

// Self-contained run record, schema "rigidreg-report/1": inputs digest,
// config echo, result, counters, wall-clock per phase, bound ledger.
struct RunReport {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // path -> digest
  std::map<std::string, std::string> config_echo;           // flat key=value
  ordered_json result;
  ordered_json counters;
  ordered_json bounds_ledger;
  std::map<std::string, double> wall_clock_seconds;

  ordered_json to_json() const;
  void write(const std::string& path) const;
};

ordered_json pyramid_ledger(const ResolutionPyramid& pyramid);
ordered_json stats_json(const SearchStats& stats);

}  // namespace rigidreg
