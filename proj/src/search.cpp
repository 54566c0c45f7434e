#include "rigidreg/search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace rigidreg {

std::vector<double> ParamBox::center() const {
  std::vector<double> c(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
  return c;
}

double ResolutionPyramid::b_res_adjusted(int l) const {
  const double safety =
      config.pipeline == TargetPipeline::UpsampledDiscretized ? config.safety_factor : 1.0;
  return levels[l].b_res * safety;
}

ResolutionPyramid build_pyramid(const DiscreteImage& f, const DiscreteImage& g,
                                const SearchConfig& config, bool symmetry) {
  if (f.dims() != g.dims()) throw std::invalid_argument("build_pyramid: dimension mismatch");
  if (std::abs(f.period() - g.period()) > 1e-12 * f.period())
    throw std::invalid_argument("build_pyramid: images must share one sampling period");
  const double nf = l2_norm(f), ng = l2_norm(g);
  if (nf == 0.0 || ng == 0.0) throw std::invalid_argument("build_pyramid: degenerate image");

  ResolutionPyramid pyr;
  pyr.dims = f.dims();
  pyr.symmetry = symmetry;
  pyr.config = config;
  pyr.f0 = std::make_shared<DiscreteImage>(f);
  pyr.g0 = std::make_shared<DiscreteImage>(g);
  pyr.norm_product = nf * ng;
  pyr.epsilon = config.epsilon_abs > 0 ? config.epsilon_abs : config.epsilon_rel * nf * ng;

  auto F = std::make_shared<Spectrum>(forward_dft(f, config.pad_factor));
  auto G = symmetry ? F : std::make_shared<Spectrum>(forward_dft(g, config.pad_factor));
  pyr.F = F;
  pyr.G = G;
  pyr.band_edges = radial_band_edges(config.bands, F->max_radius() * (1 + 1e-9));

  if (config.pipeline == TargetPipeline::UpsampledDiscretized)
    pyr.g_up = std::make_shared<DiscreteImage>(upsample(g, config.upsample_p));

  // In symmetry mode the target reflects f onto itself, so the Jacobian side
  // is f as well; in registration it is g (the rotated image).
  const JacobianSpectrum jac = jacobian_spectrum(symmetry ? f : g, config.pad_factor);

  // Decimation schedule: powers of two while the high-band energy stays below
  // the threshold and the coarse grid keeps its minimum extent.
  std::vector<int> ms{1};
  int min_extent = std::numeric_limits<int>::max();
  for (int a = 0; a < f.dims(); ++a) min_extent = std::min(min_extent, f.extent(a));
  for (int m = 2; !config.force_single_resolution; m *= 2) {
    if ((min_extent - 1) / m + 1 < config.min_coarse_extent) break;
    const double cutoff = 1.0 / (2.0 * m * f.period());
    const double e_h = std::sqrt(highband_energy(*F, cutoff)) *
                       std::sqrt(highband_energy(*G, cutoff));
    if (e_h >= config.energy_fraction * pyr.norm_product) break;
    ms.push_back(m);
  }

  const bool freq = config.pipeline == TargetPipeline::SincFrequency;
  for (int m : ms) {
    PyramidLevel level;
    level.m = m;
    level.cutoff = 1.0 / (2.0 * m * f.period());
    if (m == 1) {
      level.b_res = 0.0;  // level 0 is the reference target
      level.f_low = pyr.f0;
      if (freq) {
        level.f_cut = F;
        level.g_cut = G;
      }
    } else {
      level.b_res = freq ? bound_sinc(*F, *G, m).value
                         : bound_upsampled(*F, *G, m, config.upsample_p, config.alpha).value;
      level.f_low = std::make_shared<DiscreteImage>(decimate(f, m, config.pad_factor));
      if (freq) {
        level.f_cut = std::make_shared<Spectrum>(radial_lowpass(*F, level.cutoff));
        level.g_cut = symmetry ? level.f_cut
                               : std::make_shared<Spectrum>(radial_lowpass(*G, level.cutoff));
      }
    }
    const double cut = m == 1 ? -1.0 : level.cutoff;
    if (symmetry) {
      level.lip_sym = lip_symmetry_base(*F, jac, pyr.band_edges, f.dims(), cut);
    } else {
      level.lip_t = lip_translation(*F, *G, pyr.band_edges, cut);
      if (f.dims() == 2)
        level.lip_rot2d = lip_rotation_2d(*F, jac, pyr.band_edges, cut);
      else
        level.lip_rot3d_base = lip_rotation_3d_base(*F, jac, pyr.band_edges, cut);
    }
    pyr.levels.push_back(std::move(level));
  }
  return pyr;
}

// ---- problems ----

namespace {

Kernel pipeline_kernel(const SearchConfig& config) {
  return config.alpha == 1 ? Kernel::box() : Kernel::triangular();
}

double eval_level_linear(const ResolutionPyramid& pyr, int level, const Mat& rot, const Vec& t) {
  const PyramidLevel& lv = pyr.levels[level];
  if (pyr.config.pipeline == TargetPipeline::SincFrequency)
    return correlation_frequency_linear(*lv.f_cut, *lv.g_cut, rot, t).value;
  return correlation_lowhigh_linear(*lv.f_low, *pyr.g_up, pipeline_kernel(pyr.config), rot, t,
                                    lv.m * pyr.config.upsample_p)
      .value;
}

}  // namespace

RegistrationProblem::RegistrationProblem(const ResolutionPyramid& pyr, bool translate)
    : pyr_(&pyr), translate_(translate) {
  if (pyr.symmetry)
    throw std::invalid_argument("RegistrationProblem needs a registration pyramid");
}

int RegistrationProblem::n_params() const {
  const int rot = pyr_->dims == 2 ? 1 : 3;
  return rot + (translate_ ? pyr_->dims : 0);
}

RigidMotion RegistrationProblem::motion(std::span<const double> params) const {
  RigidMotion mo;
  mo.dims = pyr_->dims;
  if (pyr_->dims == 2) {
    mo.theta = params[0];
    if (translate_) {
      mo.translation[0] = params[1];
      mo.translation[1] = params[2];
    }
  } else {
    mo.phi = params[0];
    mo.psi = params[1];
    mo.theta = params[2];
    if (translate_)
      for (int a = 0; a < 3; ++a) mo.translation[a] = params[3 + a];
  }
  return mo;
}

double RegistrationProblem::eval(int level, std::span<const double> params) const {
  const RigidMotion mo = motion(params);
  return eval_level_linear(*pyr_, level, rotation_matrix(mo), mo.translation);
}

double RegistrationProblem::lip_bound(int level, const ParamBox& box) const {
  const PyramidLevel& lv = pyr_->levels[level];
  double bound = 0.0;
  if (pyr_->dims == 2) {
    bound += lv.lip_rot2d * box.half_width(0);
    if (translate_)
      bound += lv.lip_t * std::hypot(box.half_width(1), box.half_width(2));
  } else {
    AngleRanges ranges;
    ranges.theta_lo = box.lo[2];
    ranges.theta_hi = box.hi[2];
    ranges.psi_lo = box.lo[1];
    ranges.psi_hi = box.hi[1];
    const double s = max_abs_sin_half(ranges.theta_lo, ranges.theta_hi);
    const double c = max_abs_cos(ranges.psi_lo, ranges.psi_hi);
    const double base = lv.lip_rot3d_base;
    bound += 2.0 * s * c * base * box.half_width(0);  // phi
    bound += 2.0 * s * base * box.half_width(1);      // psi
    bound += base * box.half_width(2);                // theta
    if (translate_) {
      double h2 = 0;
      for (int a = 0; a < 3; ++a) h2 += box.half_width(3 + a) * box.half_width(3 + a);
      bound += lv.lip_t * std::sqrt(h2);
    }
  }
  return bound;
}

std::vector<double> RegistrationProblem::split_weights(int level, const ParamBox& box) const {
  const PyramidLevel& lv = pyr_->levels[level];
  std::vector<double> w(n_params(), 0.0);
  if (pyr_->dims == 2) {
    w[0] = lv.lip_rot2d * box.half_width(0);
    if (translate_) {
      w[1] = lv.lip_t * box.half_width(1);
      w[2] = lv.lip_t * box.half_width(2);
    }
  } else {
    const double s = max_abs_sin_half(box.lo[2], box.hi[2]);
    const double c = max_abs_cos(box.lo[1], box.hi[1]);
    const double base = lv.lip_rot3d_base;
    w[0] = 2.0 * s * c * base * box.half_width(0);
    w[1] = 2.0 * s * base * box.half_width(1);
    w[2] = base * box.half_width(2);
    if (translate_)
      for (int a = 0; a < 3; ++a) w[3 + a] = lv.lip_t * box.half_width(3 + a);
  }
  return w;
}

ParamBox RegistrationProblem::default_box(double max_shift_world) const {
  ParamBox box;
  const double pi = std::numbers::pi;
  if (pyr_->dims == 2) {
    box.lo = {-pi};
    box.hi = {pi};
  } else {
    box.lo = {-pi, -pi / 2, -pi};
    box.hi = {pi, pi / 2, pi};
  }
  if (translate_)
    for (int a = 0; a < pyr_->dims; ++a) {
      box.lo.push_back(-max_shift_world);
      box.hi.push_back(max_shift_world);
    }
  return box;
}

SymmetryProblem::SymmetryProblem(const ResolutionPyramid& pyr) : pyr_(&pyr) {
  if (!pyr.symmetry) throw std::invalid_argument("SymmetryProblem needs a symmetry pyramid");
}

double SymmetryProblem::eval(int level, std::span<const double> params) const {
  const int d = pyr_->dims;
  const double phi = params[0];
  const double psi = d == 3 ? params[1] : 0.0;
  const double alpha = params[d == 2 ? 1 : 2];
  const Vec u = d == 2 ? Vec{std::cos(phi), std::sin(phi), 0} : axis_from_angles(phi, psi);
  const Mat refl = Mat::reflection(u, d);
  Vec t{0, 0, 0};
  for (int a = 0; a < d; ++a) t[a] = -2.0 * alpha * u[a];
  return eval_level_linear(*pyr_, level, refl, t);
}

double SymmetryProblem::lip_bound(int level, const ParamBox& box) const {
  const auto w = split_weights(level, box);
  return std::accumulate(w.begin(), w.end(), 0.0);
}

std::vector<double> SymmetryProblem::split_weights(int level, const ParamBox& box) const {
  const LipSymmetryBase& base = pyr_->levels[level].lip_sym;
  const int d = pyr_->dims;
  std::vector<double> w(n_params(), 0.0);
  const int ai = d == 2 ? 1 : 2;
  const double a_max = std::max(std::abs(box.lo[ai]), std::abs(box.hi[ai]));
  if (d == 2) {
    w[0] = (a_max * base.alpha_sum + base.rot2d) * box.half_width(0);
    w[1] = base.alpha_sum * box.half_width(1);
  } else {
    const double l_psi = a_max * base.alpha_sum + base.rot3d;
    const double c = max_abs_cos(box.lo[1], box.hi[1]);
    w[0] = c * l_psi * box.half_width(0);
    w[1] = l_psi * box.half_width(1);
    w[2] = base.alpha_sum * box.half_width(2);
  }
  return w;
}

ParamBox SymmetryProblem::default_box() const {
  // Hemisphere canonicalization removes the (u, a) = (-u, -a) degeneracy.
  ParamBox box;
  const double pi = std::numbers::pi;
  double diag = 0;
  for (int a = 0; a < pyr_->dims; ++a) {
    const double side = pyr_->f0->period() * (pyr_->f0->extent(a) - 1);
    diag += side * side;
  }
  diag = std::sqrt(diag);
  if (pyr_->dims == 2) {
    box.lo = {0.0, -diag / 2};
    box.hi = {pi, diag / 2};
  } else {
    box.lo = {-pi, 0.0, -diag / 2};
    box.hi = {pi, pi / 2, diag / 2};
  }
  return box;
}

// ---- bound assembly and splitting ----

double total_bound(const ParamBox& box, const ResolutionPyramid& pyramid, int level) {
  if (box.b_total.empty()) throw std::invalid_argument("total_bound: ledger not filled");
  (void)pyramid;
  return box.b_total[level];
}

void fill_ledger(const BnbProblem& problem, ParamBox& box) {
  const ResolutionPyramid& pyr = problem.pyramid();
  const int n_levels = static_cast<int>(pyr.levels.size());
  box.b_lip.resize(n_levels);
  box.b_total.resize(n_levels);
  for (int l = 0; l < n_levels; ++l) {
    box.b_lip[l] = problem.lip_bound(l, box);
    box.b_total[l] = pyr.b_res_adjusted(l) + box.b_lip[l];
  }
  // argmin with ties favouring the smallest level (highest resolution)
  box.l_min = 0;
  for (int l = 1; l < n_levels; ++l)
    if (box.b_total[l] < box.b_total[box.l_min]) box.l_min = l;
  // optional: settle for the coarsest level within a fraction of epsilon
  const double slack = pyr.config.level_tie_fraction * pyr.epsilon;
  if (slack > 0)
    for (int l = n_levels - 1; l > box.l_min; --l)
      if (box.b_total[l] <= box.b_total[box.l_min] + slack) {
        box.l_min = l;
        break;
      }
}

std::vector<ParamBox> split_box(const ParamBox& box, const BnbProblem& problem, double q_star) {
  const ResolutionPyramid& pyr = problem.pyramid();
  ParamBox work = box;
  if (work.b_total.empty()) fill_ledger(problem, work);
  const int l_min = work.l_min;
  std::vector<double> w = problem.split_weights(l_min, work);
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });

  const double threshold = q_star - pyr.b_res_adjusted(l_min);
  std::vector<bool> split(w.size(), false);
  double rest = std::accumulate(w.begin(), w.end(), 0.0);
  int n_split = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t p = order[k];
    if (work.hi[p] - work.lo[p] <= 0.0) continue;  // degenerate axis
    split[p] = true;
    ++n_split;
    rest -= w[p];
    if (rest < threshold) break;
  }
  if (n_split == 0) return {};  // fully degenerate box

  std::vector<ParamBox> children{ParamBox{work.lo, work.hi, {}, {}, 0}};
  for (std::size_t p = 0; p < w.size(); ++p) {
    if (!split[p]) continue;
    std::vector<ParamBox> next;
    next.reserve(children.size() * 2);
    for (const ParamBox& c : children) {
      const double mid = 0.5 * (c.lo[p] + c.hi[p]);
      ParamBox a = c, b = c;
      a.hi[p] = mid;
      b.lo[p] = mid;
      next.push_back(std::move(a));
      next.push_back(std::move(b));
    }
    children.swap(next);
  }
  return children;
}

// ---- Algorithm 2 ----

BnbResult branch_and_bound(const BnbProblem& problem, const ParamBox& box0,
                           const std::optional<std::vector<double>>& initial_params,
                           const ProgressCallback& progress) {
  const ResolutionPyramid& pyr = problem.pyramid();
  const int n_levels = static_cast<int>(pyr.levels.size());
  const int l_max = n_levels - 1;
  const double inf = std::numeric_limits<double>::infinity();

  BnbResult res;
  res.levels_used = n_levels;
  res.stats.evals_per_level.assign(n_levels, 0);
  res.stats.rejected_per_level.assign(n_levels, 0);

  auto eval = [&](int l, const std::vector<double>& p) {
    ++res.stats.evals_per_level[l];
    if (l == 0) ++res.stats.full_res_evals;
    return problem.eval(l, p);
  };

  double q_star = -inf;
  std::vector<double> best = box0.center();
  if (initial_params && !initial_params->empty()) {
    best = *initial_params;
    q_star = eval(0, best);
  }
  double q_cand = -inf;           // best low-resolution lower bound (Q^{l*})
  std::vector<double> cand;       // its parameters
  bool cand_evaluated = true;

  struct Node {
    ParamBox box;
    bool delimiter = false;
  };
  std::deque<Node> queue;
  queue.push_back(Node{box0, false});
  queue.push_back(Node{{}, true});

  double level_up = -inf;  // max cube upper bound among this level's survivors
  int bfs_level = 0;
  res.q_up = inf;

  while (!queue.empty()) {
    Node node = std::move(queue.front());
    queue.pop_front();

    if (node.delimiter) {
      if (!cand_evaluated && !cand.empty()) {
        const double q0 = eval(0, cand);
        if (q0 > q_star) {
          q_star = q0;
          best = cand;
        }
        cand_evaluated = true;
      }
      const double q_up = std::max(q_star, level_up);
      res.q_up = q_up;
      if (progress)
        progress(ProgressEvent{bfs_level, res.stats.cubes_processed,
                               res.stats.rejected_per_level, q_star, q_up});
      ++bfs_level;
      if (queue.empty() || q_up - q_star < pyr.epsilon) {
        res.complete = true;
        break;
      }
      level_up = -inf;
      queue.push_back(Node{{}, true});
      continue;
    }

    if (res.stats.cubes_processed >= pyr.config.node_budget) {
      res.complete = false;
      break;
    }
    ++res.stats.cubes_processed;

    ParamBox& box = node.box;
    fill_ledger(problem, box);
    const std::vector<double> center = box.center();

    bool rejected = false;
    double cube_up = inf;
    double q_lmin = 0.0;
    for (int l = l_max; l >= box.l_min; --l) {
      const double ql = eval(l, center);
      if (l == box.l_min) q_lmin = ql;
      cube_up = std::min(cube_up, ql + box.b_total[l]);
      if (ql + box.b_total[l] <= q_star) {
        ++res.stats.rejected_per_level[l];
        rejected = true;
        break;
      }
    }
    if (rejected) continue;

    ++res.stats.cubes_survived;
    level_up = std::max(level_up, cube_up);
    const double lower = q_lmin - pyr.b_res_adjusted(box.l_min);
    if (lower > q_cand) {
      q_cand = lower;
      cand = center;
      cand_evaluated = false;
    }
    if (q_cand > q_star) {
      q_star = q_cand;
      best = cand;
    }

    for (ParamBox& child : split_box(box, problem, q_star)) {
      queue.push_back(Node{std::move(child), false});
      ++res.stats.cubes_split;
    }
  }

  res.params = best;
  res.q_star = q_star;
  if (!std::isfinite(res.q_up)) res.q_up = q_star;
  return res;
}

// ---- Algorithm 1 ----

GridSearchResult grid_search_multires(const BnbProblem& problem,
                                      const std::vector<std::vector<double>>& grid) {
  if (grid.empty()) throw std::invalid_argument("grid_search_multires: empty grid");
  const ResolutionPyramid& pyr = problem.pyramid();
  const int n_levels = static_cast<int>(pyr.levels.size());

  GridSearchResult res;
  res.stats.evals_per_level.assign(n_levels, 0);
  res.stats.rejected_per_level.assign(n_levels, 0);
  res.eliminated_fraction.assign(n_levels, 0.0);
  res.level_m.resize(n_levels);
  for (int l = 0; l < n_levels; ++l) res.level_m[l] = pyr.levels[l].m;

  const double inf = std::numeric_limits<double>::infinity();
  double q_star = -inf;
  std::size_t best_index = 0;
  bool have_best = false;

  std::vector<std::size_t> alive(grid.size());
  std::iota(alive.begin(), alive.end(), 0);
  std::vector<double> ql(grid.size(), 0.0);

  for (int l = n_levels - 1; l >= 0; --l) {
    // maximize Q^l over the surviving grid
    std::size_t arg = alive.front();
    double q_max = -inf;
    for (std::size_t idx : alive) {
      ql[idx] = problem.eval(l, grid[idx]);
      ++res.stats.evals_per_level[l];
      if (ql[idx] > q_max) {
        q_max = ql[idx];
        arg = idx;
      }
    }
    // full-resolution value at the level maximizer
    double q_full;
    if (l == 0) {
      q_full = ql[arg];  // already the full-resolution target
    } else {
      q_full = problem.eval(0, grid[arg]);
      ++res.stats.full_res_evals;
    }
    if (q_full > q_star) {
      q_star = q_full;
      best_index = arg;
      have_best = true;
    }
    // rule out
    const double threshold = q_star - pyr.b_res_adjusted(l);
    std::vector<std::size_t> next;
    next.reserve(alive.size());
    for (std::size_t idx : alive) {
      if (ql[idx] < threshold) {
        ++res.stats.rejected_per_level[l];
      } else {
        next.push_back(idx);
      }
    }
    res.eliminated_fraction[l] =
        static_cast<double>(alive.size() - next.size()) / static_cast<double>(grid.size());
    alive.swap(next);
    if (alive.empty()) break;
  }
  (void)have_best;
  res.best_index = best_index;
  res.best_params = grid[best_index];
  res.q_star = q_star;
  return res;
}

}  // namespace rigidreg
