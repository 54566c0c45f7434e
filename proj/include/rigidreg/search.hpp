#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rigidreg/bounds.hpp"
#include "rigidreg/lipschitz.hpp"
#include "rigidreg/target.hpp"

namespace rigidreg {

// Q^l evaluation style for the pyramid levels.
//  UpsampledDiscretized: low-to-high discretized target against a p-upsampled
//    g with the alpha kernel, bounded by the upsampled-spectrum bound
//    (the production setup; discretization guarded by `safety_factor`).
//  SincFrequency: frequency-domain targets on ball-restricted spectra with
//    the sinc-ideal bound (exact-integral mode; no safety factor).
enum class TargetPipeline { UpsampledDiscretized, SincFrequency };

struct SearchConfig {
  double epsilon_rel = 0.01;   // epsilon = epsilon_rel * ||f|| ||g||
  double epsilon_abs = -1.0;   // used instead when > 0
  double energy_fraction = 0.05;
  int min_coarse_extent = 8;
  int pad_factor = 2;
  TargetPipeline pipeline = TargetPipeline::UpsampledDiscretized;
  int upsample_p = 2;
  int alpha = 2;  // 1 box, 2 bilinear/trilinear reads
  double safety_factor = 1.02;
  int bands = 32;
  std::uint64_t node_budget = 10'000'000;
  bool force_single_resolution = false;
  // 0 = evaluate down to the exact argmin of B_total.
  // A fraction x > 0 stops at the coarsest level whose total bound is within
  // x*epsilon of the minimum; the certificate loosens by at most x*epsilon
  // per cube, so any x < 0.5 keeps the epsilon-optimality guarantee and
  // termination while skipping full-resolution evaluations that cannot
  // change the reject decision.
  double level_tie_fraction = 0.0;
  std::optional<RigidMotion> initial;
};

// Axis-aligned hyperrectangle in parameter space with the per-level bound
// ledger filled in during processing.
struct ParamBox {
  std::vector<double> lo, hi;
  std::vector<double> b_lip;    // per level
  std::vector<double> b_total;  // per level
  int l_min = 0;

  std::vector<double> center() const;
  double half_width(std::size_t p) const { return 0.5 * (hi[p] - lo[p]); }
};

struct PyramidLevel {
  int m = 1;
  double cutoff = 0.0;  // 1/(2 m T)
  double b_res = 0.0;   // raw (un-adjusted) inter-resolution bound; 0 at level 0
  std::shared_ptr<const DiscreteImage> f_low;    // discretized pipeline (level 0: f)
  std::shared_ptr<const Spectrum> f_cut, g_cut;  // frequency pipeline
  // Lipschitz base integrals restricted to this level's ball
  double lip_t = 0.0;
  double lip_rot2d = 0.0;
  double lip_rot3d_base = 0.0;
  LipSymmetryBase lip_sym;
};

// Per-level decimated data, inter-resolution bounds and Lipschitz bases for
// one image pair (g = f in symmetry mode).
struct ResolutionPyramid {
  int dims = 2;
  bool symmetry = false;
  SearchConfig config;
  std::shared_ptr<const DiscreteImage> f0, g0;
  std::shared_ptr<const DiscreteImage> g_up;  // p-upsampled g (discretized pipeline)
  std::shared_ptr<const Spectrum> F, G;
  std::vector<double> band_edges;
  double norm_product = 0.0;
  double epsilon = 0.0;
  std::vector<PyramidLevel> levels;

  int l_max() const { return static_cast<int>(levels.size()) - 1; }
  // safety-adjusted inter-resolution bound used in reject tests
  double b_res_adjusted(int l) const;
};

ResolutionPyramid build_pyramid(const DiscreteImage& f, const DiscreteImage& g,
                                const SearchConfig& config, bool symmetry = false);

// A branch-and-bound problem: parameter vector semantics, per-level target
// evaluation and per-level Lipschitz bound assembly over a box.
class BnbProblem {
 public:
  virtual ~BnbProblem() = default;
  virtual const ResolutionPyramid& pyramid() const = 0;
  virtual int n_params() const = 0;
  virtual double eval(int level, std::span<const double> params) const = 0;
  // Tight Lipschitz bound over the box at a level.
  virtual double lip_bound(int level, const ParamBox& box) const = 0;
  // Per-parameter contributions used for split ordering (their sum >= the
  // tight bound).
  virtual std::vector<double> split_weights(int level, const ParamBox& box) const = 0;
};

// Registration over (theta, tx, ty) in 2D or (phi, psi, theta[, t]) in 3D.
class RegistrationProblem final : public BnbProblem {
 public:
  RegistrationProblem(const ResolutionPyramid& pyr, bool translate);
  const ResolutionPyramid& pyramid() const override { return *pyr_; }
  int n_params() const override;
  double eval(int level, std::span<const double> params) const override;
  double lip_bound(int level, const ParamBox& box) const override;
  std::vector<double> split_weights(int level, const ParamBox& box) const override;
  RigidMotion motion(std::span<const double> params) const;
  ParamBox default_box(double max_shift_world) const;

 private:
  const ResolutionPyramid* pyr_;
  bool translate_;
};

// Reflective symmetry over (phi, alpha) in 2D or (phi, psi, alpha) in 3D.
class SymmetryProblem final : public BnbProblem {
 public:
  explicit SymmetryProblem(const ResolutionPyramid& pyr);
  const ResolutionPyramid& pyramid() const override { return *pyr_; }
  int n_params() const override { return pyr_->dims == 2 ? 2 : 3; }
  double eval(int level, std::span<const double> params) const override;
  double lip_bound(int level, const ParamBox& box) const override;
  std::vector<double> split_weights(int level, const ParamBox& box) const override;
  ParamBox default_box() const;

 private:
  const ResolutionPyramid* pyr_;
};

struct SearchStats {
  std::vector<std::uint64_t> evals_per_level;
  std::vector<std::uint64_t> rejected_per_level;
  std::uint64_t cubes_processed = 0;
  std::uint64_t cubes_survived = 0;  // processed minus rejected
  std::uint64_t cubes_split = 0;     // children enqueued
  std::uint64_t full_res_evals = 0;
};

// Emitted once per breadth-first level (at the level delimiter).
struct ProgressEvent {
  int bfs_level = 0;
  std::uint64_t cubes_processed = 0;
  std::vector<std::uint64_t> rejected_per_level;
  double q_star = 0.0;
  double q_up = 0.0;
};
using ProgressCallback = std::function<void(const ProgressEvent&)>;

struct BnbResult {
  std::vector<double> params;
  double q_star = 0.0;
  double q_up = 0.0;
  bool complete = true;
  int levels_used = 0;
  SearchStats stats;
};

// Total bound B_res^l + B_Lip^l for a box whose ledger has been filled.
double total_bound(const ParamBox& box, const ResolutionPyramid& pyramid, int level);

// Fill the box ledger (B_Lip, B_total per level, l_min) for a problem.
void fill_ledger(const BnbProblem& problem, ParamBox& box);

// Split per the descending-contribution rule: bisect parameters in order
// until the contributions of the rest sum below Q* - B_res^{l_min}.
std::vector<ParamBox> split_box(const ParamBox& box, const BnbProblem& problem, double q_star);

// Multiresolution Lipschitz branch and bound (breadth-first with level
// delimiters); epsilon-optimal w.r.t. the level-0 target. Optional initial
// parameters seed Q*.
BnbResult branch_and_bound(const BnbProblem& problem, const ParamBox& box0,
                           const std::optional<std::vector<double>>& initial_params = {},
                           const ProgressCallback& progress = {});

struct GridSearchResult {
  std::size_t best_index = 0;
  std::vector<double> best_params;
  double q_star = 0.0;
  // fraction of grid elements ruled out at each level, coarsest first
  std::vector<double> eliminated_fraction;
  std::vector<int> level_m;
  SearchStats stats;
};

// Multiresolution grid search: per level maximize Q^l over the surviving
// grid, update Q* with the full-resolution value at the maximizer, discard
// elements with Q^l < Q* - B_res^l.
GridSearchResult grid_search_multires(const BnbProblem& problem,
                                      const std::vector<std::vector<double>>& grid);

}  // namespace rigidreg
