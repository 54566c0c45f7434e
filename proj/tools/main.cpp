#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>

#include "rigidreg/bounds.hpp"
#include "rigidreg/io.hpp"
#include "rigidreg/report.hpp"
#include "rigidreg/search.hpp"
#include "rigidreg/symmetry.hpp"

namespace {

using namespace rigidreg;

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;
constexpr int kExitBudget = 4;

struct CommonOpts {
  std::string report_path;
  bool invert = false;
  SearchConfig cfg;
  std::string pipeline = "upsampled";
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void add_search_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->set_config("--config", "", "flat key=value configuration file");
  cmd->add_option("--report", opts.report_path, "write the JSON run report here");
  cmd->add_flag("--invert", opts.invert, "read intensities as 1 - v (bright backgrounds)");
  cmd->add_option("--epsilon-rel", opts.cfg.epsilon_rel,
                  "convergence threshold as a fraction of ||f|| ||g||");
  cmd->add_option("--epsilon-abs", opts.cfg.epsilon_abs,
                  "absolute convergence threshold (overrides --epsilon-rel when > 0)");
  cmd->add_option("--energy-fraction", opts.cfg.energy_fraction,
                  "high-band energy fraction capping the coarsest level");
  cmd->add_option("--min-coarse-extent", opts.cfg.min_coarse_extent,
                  "minimum samples per axis at the coarsest level");
  cmd->add_option("--pad", opts.cfg.pad_factor, "DFT zero-padding factor");
  cmd->add_option("--pipeline", opts.pipeline, "level targets: 'upsampled' or 'sinc'")
      ->check(CLI::IsMember({"upsampled", "sinc"}));
  cmd->add_option("--p", opts.cfg.upsample_p, "g upsampling factor (upsampled pipeline)");
  cmd->add_option("--alpha", opts.cfg.alpha, "interpolation kernel exponent: 1 box, 2 bilinear")
      ->check(CLI::IsMember({1, 2}));
  cmd->add_option("--safety", opts.cfg.safety_factor,
                  "inflation factor on discretized inter-resolution bounds");
  cmd->add_option("--bands", opts.cfg.bands, "radial band count for Lipschitz constants");
  cmd->add_option("--node-budget", opts.cfg.node_budget, "cube budget before giving up");
  cmd->add_option("--level-tie", opts.cfg.level_tie_fraction,
                  "treat levels within this fraction of epsilon as ties and evaluate "
                  "at the coarsest one (0 = exact argmin)");
  cmd->add_flag("--single-resolution", opts.cfg.force_single_resolution,
                "disable the multiresolution pyramid");
}

SearchConfig finalize_config(CommonOpts& opts) {
  opts.cfg.pipeline = opts.pipeline == "sinc" ? TargetPipeline::SincFrequency
                                              : TargetPipeline::UpsampledDiscretized;
  return opts.cfg;
}

std::map<std::string, std::string> echo_config(const CLI::App& cmd) {
  std::map<std::string, std::string> echo;
  for (const CLI::Option* opt : cmd.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (!opt->results().empty()) {
      std::string joined;
      for (const auto& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
      echo[name] = joined;
    } else {
      echo[name] = opt->get_default_str();
    }
  }
  return echo;
}

ordered_json motion_json(const RigidMotion& motion) {
  ordered_json j;
  j["dims"] = motion.dims;
  j["theta"] = motion.theta;
  if (motion.dims == 3) {
    j["phi"] = motion.phi;
    j["psi"] = motion.psi;
  }
  j["translation"] = std::vector<double>(motion.translation.begin(),
                                         motion.translation.begin() + motion.dims);
  return j;
}

// Resample g through the recovered transform onto f's grid.
DiscreteImage resample_registered(const DiscreteImage& f, const DiscreteImage& g,
                                  const RigidMotion& motion) {
  const RigidMotion mo = canonical(motion);
  const Mat rot = rotation_matrix(mo);
  DiscreteImage out(f.dims(), f.extents(), f.period(), f.origin());
  out.for_each([&](const Index& i, std::size_t lin) {
    Vec x = out.site_position(i);
    for (int a = 0; a < f.dims(); ++a) x[a] += mo.translation[a];
    out.samples()[lin] = interpolate(g, Kernel::triangular(), rot.apply(x));
  });
  return out;
}

Vec center_of_mass(const DiscreteImage& img) {
  Vec com{0, 0, 0};
  double mass = 0;
  img.for_each([&](const Index& i, std::size_t lin) {
    const double v = std::abs(img.samples()[lin]);
    mass += v;
    const Vec x = img.site_position(i);
    for (int a = 0; a < img.dims(); ++a) com[a] += v * x[a];
  });
  if (mass <= 0) throw std::invalid_argument("center of mass of an empty image");
  for (int a = 0; a < img.dims(); ++a) com[a] /= mass;
  return com;
}

void center_origin(DiscreteImage& img) {
  Vec origin{0, 0, 0};
  for (int a = 0; a < img.dims(); ++a) origin[a] = 0.5 * img.period() * (img.extent(a) - 1);
  img.set_origin(origin);
}

int run_registration(const std::string& command, const std::string& f_path,
                     const std::string& g_path, CommonOpts& opts, bool is_3d, bool full_6dof,
                     double max_shift_px, const std::string& registered_out,
                     const std::vector<double>& init, const CLI::App& cmd) {
  RunReport report;
  report.command = command;
  const double t0 = now_seconds();
  DiscreteImage f = read_image(f_path, opts.invert);
  DiscreteImage g = read_image(g_path, opts.invert);
  if ((f.dims() == 3) != is_3d || (g.dims() == 3) != is_3d)
    throw std::invalid_argument("input dimensionality does not match the subcommand");
  if (f.dims() != g.dims()) throw std::invalid_argument("dimension mismatch between inputs");

  const bool rotation_only = is_3d && !full_6dof;
  if (rotation_only) {
    // center-of-mass pre-alignment: both origins move to the mass centers,
    // so a pure rotation about the world origin aligns them
    center_origin(f);
    center_origin(g);
    f.set_origin(center_of_mass(f));
    g.set_origin(center_of_mass(g));
  } else {
    center_origin(f);
    center_origin(g);
  }
  report.inputs = {{f_path, file_digest(f_path)}, {g_path, file_digest(g_path)}};
  const double t_load = now_seconds();

  const SearchConfig cfg = finalize_config(opts);
  ResolutionPyramid pyr = build_pyramid(f, g, cfg);
  const double t_pyr = now_seconds();

  RegistrationProblem problem(pyr, !rotation_only);
  ParamBox box = problem.default_box(max_shift_px * f.period());
  std::optional<std::vector<double>> init_params;
  if (!init.empty()) init_params = init;
  BnbResult res = branch_and_bound(problem, box, init_params);
  const double t_search = now_seconds();

  const RigidMotion motion = problem.motion(res.params);
  report.config_echo = echo_config(cmd);
  report.config_echo["input.f"] = f_path;
  report.config_echo["input.g"] = g_path;
  report.result = ordered_json{};
  report.result["motion"] = motion_json(motion);
  report.result["q_star"] = res.q_star;
  report.result["q_up"] = res.q_up;
  report.result["epsilon"] = pyr.epsilon;
  report.result["complete"] = res.complete;
  report.counters = stats_json(res.stats);
  report.bounds_ledger = pyramid_ledger(pyr);
  report.wall_clock_seconds = {{"load", t_load - t0},
                               {"pyramid", t_pyr - t_load},
                               {"search", t_search - t_pyr},
                               {"total", t_search - t0}};
  if (!registered_out.empty()) write_image(registered_out, resample_registered(f, g, motion));
  if (!opts.report_path.empty()) report.write(opts.report_path);
  std::cout << report.to_json().dump(2) << "\n";
  return res.complete ? kExitOk : kExitBudget;
}

std::vector<double> parse_sweep(const std::string& spec) {
  // "theta:lo:hi:n" -> n+1 evenly spaced values
  std::istringstream in(spec);
  std::string name, lo_s, hi_s, n_s;
  std::getline(in, name, ':');
  std::getline(in, lo_s, ':');
  std::getline(in, hi_s, ':');
  std::getline(in, n_s, ':');
  if (name != "theta" || lo_s.empty() || hi_s.empty() || n_s.empty())
    throw std::invalid_argument("sweep spec must be theta:<lo>:<hi>:<count>");
  const double lo = std::stod(lo_s), hi = std::stod(hi_s);
  const int n = std::stoi(n_s);
  if (n < 1 || hi <= lo) throw std::invalid_argument("malformed sweep range");
  std::vector<double> out(n + 1);
  for (int i = 0; i <= n; ++i) out[i] = lo + (hi - lo) * i / n;
  return out;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

int run_bounds_report(const std::string& f_path, const std::string& g_path, CommonOpts& opts,
                      const std::string& variant, const std::vector<int>& m_list,
                      const std::string& sweep_spec, const std::string& csv_path,
                      const CLI::App& cmd) {
  DiscreteImage f = read_image(f_path, opts.invert);
  DiscreteImage g = read_image(g_path, opts.invert);
  if (f.dims() != 2) throw std::invalid_argument("bounds-report sweeps 2D rotation only");
  center_origin(f);
  center_origin(g);
  const SearchConfig cfg = finalize_config(opts);

  const Spectrum F = forward_dft(f, cfg.pad_factor);
  const Spectrum G = forward_dft(g, cfg.pad_factor);
  const std::vector<double> thetas = parse_sweep(sweep_spec);

  std::ofstream csv(csv_path);
  if (!csv) throw IoError(csv_path + ": cannot open for writing");
  csv << "variant,m,theta,q_high,q_low,lower,upper\n";

  for (int m : m_list) {
    if (m < 1) throw std::invalid_argument("bounds-report: m must be >= 1");
    double bound = 0;
    if (variant == "sinc")
      bound = bound_sinc(F, G, m).value;
    else if (variant == "boundedsupport")
      bound = bound_bounded_support(F, G, m, cfg.alpha).value;
    else if (variant == "lowhigh")
      bound = bound_lowhigh(F, G, m, cfg.alpha).value;
    else if (variant == "discretized")
      bound = bound_discretized_one_sinc(F, G, m, cfg.alpha).value;
    else if (variant == "upsampled")
      bound = bound_upsampled(F, G, m, cfg.upsample_p, cfg.alpha).value;
    else if (variant == "radial")
      bound = bound_radial_bands(
                  F, G, m,
                  [&] {
                    std::vector<double> e = radial_band_edges(cfg.bands, F.max_radius() * (1 + 1e-9));
                    const double cutoff = 1.0 / (2.0 * m * f.period());
                    std::vector<double> edges{cutoff};
                    for (double v : e)
                      if (v > cutoff) edges.push_back(v);
                    return edges;
                  }())
                  .value;
    else
      throw std::invalid_argument("unknown bound variant '" + variant + "'");

    // matching targets for the sweep rows
    const double cutoff = 1.0 / (2.0 * m * f.period());
    std::shared_ptr<const DiscreteImage> f_low, g_low, g_up;
    std::shared_ptr<const Spectrum> FL, GL;
    const bool exact_pair = variant == "sinc" || variant == "radial";
    if (exact_pair) {
      FL = std::make_shared<Spectrum>(radial_lowpass(F, cutoff));
      GL = std::make_shared<Spectrum>(radial_lowpass(G, cutoff));
    } else {
      f_low = std::make_shared<DiscreteImage>(m == 1 ? f : decimate(f, m, cfg.pad_factor));
      if (variant == "upsampled") {
        g_up = std::make_shared<DiscreteImage>(upsample(g, cfg.upsample_p));
      } else {
        g_low = std::make_shared<DiscreteImage>(m == 1 ? g : decimate(g, m, cfg.pad_factor));
      }
    }
    const Kernel kernel = cfg.alpha == 1 ? Kernel::box() : Kernel::triangular();
    for (double theta : thetas) {
      const RigidMotion mo = RigidMotion::planar(theta);
      double q_high = 0, q_low = 0;
      if (exact_pair) {
        q_high = correlation_frequency(F, G, mo).value;
        q_low = correlation_frequency(*FL, *GL, mo).value;
      } else if (variant == "upsampled") {
        q_high = correlation_lowhigh(f, *g_up, kernel, mo, cfg.upsample_p).value;
        q_low = correlation_lowhigh(*f_low, *g_up, kernel, mo, m * cfg.upsample_p).value;
      } else if (variant == "discretized") {
        q_high = correlation_discretized(f, g, kernel, mo).value;
        q_low = correlation_discretized(*f_low, *g_low, kernel, mo).value;
      } else {
        q_high = correlation_exact(f, g, kernel, mo).value;
        q_low = variant == "lowhigh" ? correlation_exact(*f_low, g, kernel, mo).value
                                     : correlation_exact(*f_low, *g_low, kernel, mo).value;
      }
      csv << csv_quote(variant) << "," << m << "," << theta << "," << q_high << "," << q_low
          << "," << (q_low - bound) << "," << (q_low + bound) << "\n";
    }
  }
  if (!csv) throw IoError(csv_path + ": write failed");

  if (!opts.report_path.empty()) {
    RunReport report;
    report.command = "bounds-report";
    report.inputs = {{f_path, file_digest(f_path)}, {g_path, file_digest(g_path)}};
    report.config_echo = echo_config(cmd);
    report.config_echo["input.f"] = f_path;
    report.config_echo["input.g"] = g_path;
    report.result["csv"] = csv_path;
    report.write(opts.report_path);
  }
  return kExitOk;
}

int run_symmetry(const std::string& f_path, CommonOpts& opts, double alpha_range_px,
                 const CLI::App& cmd) {
  RunReport report;
  report.command = "symmetry";
  const double t0 = now_seconds();
  DiscreteImage f = read_image(f_path, opts.invert);
  center_origin(f);
  report.inputs = {{f_path, file_digest(f_path)}};
  const double t_load = now_seconds();

  const SearchConfig cfg = finalize_config(opts);
  ResolutionPyramid pyr = build_pyramid(f, f, cfg, /*symmetry=*/true);
  const double t_pyr = now_seconds();
  SymmetryProblem problem(pyr);
  ParamBox box = problem.default_box();
  if (alpha_range_px > 0) {
    const int ai = f.dims() == 2 ? 1 : 2;
    box.lo[ai] = -alpha_range_px * f.period();
    box.hi[ai] = alpha_range_px * f.period();
  }
  BnbResult res = branch_and_bound(problem, box);
  const double t_search = now_seconds();

  report.config_echo = echo_config(cmd);
  report.config_echo["input.f"] = f_path;
  report.result["phi"] = res.params[0];
  if (f.dims() == 3) report.result["psi"] = res.params[1];
  report.result["alpha_plane"] = res.params[f.dims() == 2 ? 1 : 2];
  report.result["q_star"] = res.q_star;
  report.result["q_up"] = res.q_up;
  report.result["epsilon"] = pyr.epsilon;
  report.result["complete"] = res.complete;
  report.counters = stats_json(res.stats);
  report.bounds_ledger = pyramid_ledger(pyr);
  report.wall_clock_seconds = {{"load", t_load - t0},
                               {"pyramid", t_pyr - t_load},
                               {"search", t_search - t_pyr},
                               {"total", t_search - t0}};
  if (!opts.report_path.empty()) report.write(opts.report_path);
  std::cout << report.to_json().dump(2) << "\n";
  return res.complete ? kExitOk : kExitBudget;
}

int run_bench(const std::string& f_path, const std::string& g_path, CommonOpts& opts,
              double max_shift_px, const CLI::App& cmd) {
  RunReport report;
  report.command = "bench";
  DiscreteImage f = read_image(f_path, opts.invert);
  DiscreteImage g = read_image(g_path, opts.invert);
  if (f.dims() != g.dims()) throw std::invalid_argument("dimension mismatch between inputs");
  center_origin(f);
  center_origin(g);
  report.inputs = {{f_path, file_digest(f_path)}, {g_path, file_digest(g_path)}};

  const bool translate = f.dims() == 2;
  auto run_one = [&](bool single) {
    CommonOpts local = opts;
    SearchConfig cfg = finalize_config(local);
    cfg.force_single_resolution = single;
    const double t0 = now_seconds();
    ResolutionPyramid pyr = build_pyramid(f, g, cfg);
    RegistrationProblem problem(pyr, translate);
    ParamBox box = problem.default_box(max_shift_px * f.period());
    BnbResult res = branch_and_bound(problem, box);
    const double t1 = now_seconds();
    ordered_json j;
    j["motion"] = motion_json(problem.motion(res.params));
    j["q_star"] = res.q_star;
    j["q_up"] = res.q_up;
    j["complete"] = res.complete;
    j["seconds"] = t1 - t0;
    j["counters"] = stats_json(res.stats);
    return std::pair<ordered_json, BnbResult>{j, res};
  };
  auto [multi_json, multi] = run_one(false);
  auto [single_json, single] = run_one(true);

  report.config_echo = echo_config(cmd);
  report.config_echo["input.f"] = f_path;
  report.config_echo["input.g"] = g_path;
  report.result["multiresolution"] = multi_json;
  report.result["single_resolution"] = single_json;
  report.result["speedup_full_res_evals"] =
      static_cast<double>(single.stats.full_res_evals) /
      std::max<std::uint64_t>(1, multi.stats.full_res_evals);
  report.result["speedup_seconds"] = single_json["seconds"].get<double>() /
                                     std::max(1e-9, multi_json["seconds"].get<double>());
  double dq = std::abs(multi.q_star - single.q_star);
  report.result["q_star_abs_difference"] = dq;
  if (!opts.report_path.empty()) report.write(opts.report_path);
  std::cout << report.to_json().dump(2) << "\n";
  return (multi.complete && single.complete) ? kExitOk : kExitBudget;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Globally optimal rigid intensity-based registration and reflective-symmetry "
               "detection via multiresolution branch and bound"};
  app.require_subcommand(1);

  // register2d
  auto* reg2d = app.add_subcommand("register2d", "2D rigid registration (theta, tx, ty)");
  CommonOpts o2;
  std::string f2, g2, out2;
  double max_shift2 = 8.0;
  std::vector<double> init2;
  reg2d->add_option("f", f2, "reference image (PGM)")->required();
  reg2d->add_option("g", g2, "moving image (PGM)")->required();
  add_search_options(reg2d, o2);
  reg2d->add_option("--max-shift", max_shift2, "translation box half-width in pixels");
  reg2d->add_option("--init", init2, "initial solution theta,tx,ty")->expected(3);
  reg2d->add_option("--write-registered", out2, "resample g through the result onto f's grid");

  // register3d
  auto* reg3d = app.add_subcommand("register3d", "3D rigid registration (rotation-only default)");
  CommonOpts o3;
  std::string f3, g3, out3;
  double max_shift3 = 8.0;
  bool full6 = false;
  std::vector<double> init3;
  reg3d->add_option("f", f3, "reference volume (RAWVOL)")->required();
  reg3d->add_option("g", g3, "moving volume (RAWVOL)")->required();
  add_search_options(reg3d, o3);
  reg3d->add_flag("--full-6dof", full6,
                  "search rotation and translation jointly (expensive) instead of the "
                  "center-of-mass pre-alignment");
  reg3d->add_option("--max-shift", max_shift3, "translation box half-width in voxels (6-DoF)");
  reg3d->add_option("--init", init3, "initial solution phi,psi,theta[,tx,ty,tz]");
  reg3d->add_option("--write-registered", out3, "resample g through the result onto f's grid");

  // symmetry
  auto* sym = app.add_subcommand("symmetry", "detect the best reflection axis/plane");
  CommonOpts os;
  std::string fs;
  double alpha_range = -1.0;
  sym->add_option("f", fs, "input image or volume")->required();
  add_search_options(sym, os);
  sym->add_option("--alpha-range", alpha_range,
                  "plane-offset search half-range in pixels (default: half the diagonal)");

  // bounds-report
  auto* br = app.add_subcommand("bounds-report", "emit per-angle bound envelopes as CSV");
  CommonOpts ob;
  std::string fb, gb, csv_path = "bounds.csv", variant = "sinc", sweep = "theta:-3.14159:3.14159:360";
  std::vector<int> m_list{2};
  br->add_option("f", fb, "reference image (PGM)")->required();
  br->add_option("g", gb, "moving image (PGM)")->required();
  add_search_options(br, ob);
  br->add_option("--out", csv_path, "CSV output path");
  br->add_option("--variant", variant,
                 "bound variant: sinc|boundedsupport|lowhigh|discretized|upsampled|radial");
  br->add_option("--m", m_list, "decimation factors");
  br->add_option("--sweep", sweep, "1-parameter sweep spec theta:<lo>:<hi>:<count>");

  // bench
  auto* bench = app.add_subcommand("bench", "compare multiresolution vs single-resolution");
  CommonOpts obe;
  std::string fbe, gbe;
  double max_shift_bench = 4.0;
  bench->add_option("f", fbe, "reference image")->required();
  bench->add_option("g", gbe, "moving image")->required();
  add_search_options(bench, obe);
  bench->add_option("--max-shift", max_shift_bench, "translation box half-width in pixels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (reg2d->parsed())
      return run_registration("register2d", f2, g2, o2, false, true, max_shift2, out2, init2,
                              *reg2d);
    if (reg3d->parsed())
      return run_registration("register3d", f3, g3, o3, true, full6, max_shift3, out3, init3,
                              *reg3d);
    if (sym->parsed()) return run_symmetry(fs, os, alpha_range, *sym);
    if (br->parsed())
      return run_bounds_report(fb, gb, ob, variant, m_list, sweep, csv_path, *br);
    if (bench->parsed()) return run_bench(fbe, gbe, obe, max_shift_bench, *bench);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
