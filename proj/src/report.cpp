#include "rigidreg/report.hpp"

#include <fstream>

#include "rigidreg/io.hpp"

namespace rigidreg {

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for digest");
  std::uint64_t h = 1469598103934665603ull;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + out;
}

ordered_json RunReport::to_json() const {
  ordered_json j;
  j["schema"] = "rigidreg-report/1";
  j["command"] = command;
  ordered_json jin = ordered_json::array();
  for (const auto& [path, digest] : inputs) {
    ordered_json e;
    e["path"] = path;
    e["digest"] = digest;
    jin.push_back(e);
  }
  j["inputs"] = jin;
  ordered_json cfg;
  for (const auto& [k, v] : config_echo) cfg[k] = v;  // std::map: sorted keys
  j["config"] = cfg;
  j["result"] = result;
  j["counters"] = counters;
  j["bounds"] = bounds_ledger;
  ordered_json wc;
  for (const auto& [k, v] : wall_clock_seconds) wc[k] = v;
  j["wall_clock_seconds"] = wc;
  return j;
}

void RunReport::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << to_json().dump(2) << "\n";
  if (!out) throw IoError(path + ": write failed");
}

ordered_json pyramid_ledger(const ResolutionPyramid& pyramid) {
  ordered_json levels = ordered_json::array();
  for (const auto& lv : pyramid.levels) {
    ordered_json e;
    e["m"] = lv.m;
    e["b_res"] = lv.b_res;
    e["b_res_adjusted"] =
        pyramid.b_res_adjusted(static_cast<int>(&lv - pyramid.levels.data()));
    e["cutoff"] = lv.cutoff;
    if (pyramid.symmetry) {
      e["lip_alpha"] = lv.lip_sym.alpha_sum;
      e["lip_rot2d"] = lv.lip_sym.rot2d;
      e["lip_rot3d"] = lv.lip_sym.rot3d;
    } else {
      e["lip_t"] = lv.lip_t;
      e["lip_rot2d"] = lv.lip_rot2d;
      e["lip_rot3d_base"] = lv.lip_rot3d_base;
    }
    levels.push_back(e);
  }
  ordered_json j;
  j["norm_product"] = pyramid.norm_product;
  j["epsilon"] = pyramid.epsilon;
  j["levels"] = levels;
  return j;
}

ordered_json stats_json(const SearchStats& stats) {
  ordered_json j;
  j["cubes_processed"] = stats.cubes_processed;
  j["cubes_split"] = stats.cubes_split;
  j["full_res_evals"] = stats.full_res_evals;
  j["evals_per_level"] = stats.evals_per_level;
  j["rejected_per_level"] = stats.rejected_per_level;
  return j;
}

}  // namespace rigidreg
