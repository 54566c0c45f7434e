#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rigidreg/bounds.hpp"
#include "rigidreg/io.hpp"
#include "rigidreg/search.hpp"
#include "rigidreg/symmetry.hpp"

namespace py = pybind11;
using namespace rigidreg;

namespace {

// numpy array (y,x) or (z,y,x) -> DiscreteImage (x fastest either way)
DiscreteImage image_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a,
                               double period) {
  const int nd = static_cast<int>(a.ndim());
  if (nd != 2 && nd != 3) throw std::invalid_argument("expected a 2D or 3D array");
  Index ext{1, 1, 1};
  for (int axis = 0; axis < nd; ++axis)
    ext[axis] = static_cast<int>(a.shape(nd - 1 - axis));
  DiscreteImage img(nd, ext, period);
  std::copy(a.data(), a.data() + a.size(), img.samples().begin());
  // rotations act about the image centre
  Vec origin{0, 0, 0};
  for (int axis = 0; axis < nd; ++axis) origin[axis] = 0.5 * period * (ext[axis] - 1);
  img.set_origin(origin);
  return img;
}

py::array_t<double> image_to_array(const DiscreteImage& img) {
  std::vector<py::ssize_t> shape;
  for (int a = img.dims() - 1; a >= 0; --a) shape.push_back(img.extent(a));
  py::array_t<double> out(shape);
  std::copy(img.samples().begin(), img.samples().end(), out.mutable_data());
  return out;
}

SearchConfig config_from_kwargs(double epsilon_rel, int pad, int bands, double safety,
                                std::uint64_t node_budget, bool single_resolution,
                                const std::string& pipeline) {
  SearchConfig cfg;
  cfg.epsilon_rel = epsilon_rel;
  cfg.pad_factor = pad;
  cfg.bands = bands;
  cfg.safety_factor = safety;
  cfg.node_budget = node_budget;
  cfg.force_single_resolution = single_resolution;
  cfg.pipeline = pipeline == "sinc" ? TargetPipeline::SincFrequency
                                    : TargetPipeline::UpsampledDiscretized;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_rigidreg, m) {
  m.doc() = "Globally optimal rigid registration and reflective-symmetry detection";

  py::class_<RigidMotion>(m, "RigidMotion")
      .def(py::init<>())
      .def_readwrite("dims", &RigidMotion::dims)
      .def_readwrite("theta", &RigidMotion::theta)
      .def_readwrite("phi", &RigidMotion::phi)
      .def_readwrite("psi", &RigidMotion::psi)
      .def_property(
          "translation",
          [](const RigidMotion& mo) {
            return std::vector<double>(mo.translation.begin(),
                                       mo.translation.begin() + mo.dims);
          },
          [](RigidMotion& mo, const std::vector<double>& t) {
            for (int a = 0; a < mo.dims && a < static_cast<int>(t.size()); ++a)
              mo.translation[a] = t[a];
          })
      .def("__repr__", [](const RigidMotion& mo) {
        return "RigidMotion(dims=" + std::to_string(mo.dims) +
               ", theta=" + std::to_string(mo.theta) + ")";
      });

  m.def(
      "correlation",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> f,
         py::array_t<double, py::array::c_style | py::array::forcecast> g,
         const RigidMotion& motion, double period, const std::string& method) {
        DiscreteImage fi = image_from_array(f, period);
        DiscreteImage gi = image_from_array(g, period);
        if (method == "frequency")
          return correlation_frequency(forward_dft(fi, 2), forward_dft(gi, 2), motion).value;
        if (method == "discretized")
          return correlation_discretized(fi, gi, Kernel::triangular(), motion).value;
        if (method == "exact")
          return correlation_exact(fi, gi, Kernel::triangular(), motion).value;
        throw std::invalid_argument("method must be frequency|discretized|exact");
      },
      py::arg("f"), py::arg("g"), py::arg("motion"), py::arg("period") = 1.0,
      py::arg("method") = "discretized",
      "Correlation target of f against the rigidly transformed g");

  m.def(
      "inter_resolution_bound",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> f,
         py::array_t<double, py::array::c_style | py::array::forcecast> g, int mfac,
         const std::string& variant, int alpha, int p, double period) {
        DiscreteImage fi = image_from_array(f, period);
        DiscreteImage gi = image_from_array(g, period);
        const Spectrum F = forward_dft(fi, 2), G = forward_dft(gi, 2);
        if (variant == "sinc") return bound_sinc(F, G, mfac).value;
        if (variant == "bounded_support") return bound_bounded_support(F, G, mfac, alpha).value;
        if (variant == "lowhigh") return bound_lowhigh(F, G, mfac, alpha).value;
        if (variant == "upsampled") return bound_upsampled(F, G, mfac, p, alpha).value;
        throw std::invalid_argument("unknown bound variant");
      },
      py::arg("f"), py::arg("g"), py::arg("m"), py::arg("variant") = "sinc",
      py::arg("alpha") = 2, py::arg("p") = 2, py::arg("period") = 1.0,
      "Provable |Q_high - Q_low| bound for decimation by m");

  m.def("decimate",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> f, int mfac,
           double period, int pad) { return image_to_array(decimate(image_from_array(f, period), mfac, pad)); },
        py::arg("f"), py::arg("m"), py::arg("period") = 1.0, py::arg("pad") = 2);

  m.def("upsample",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> f, int p,
           double period) { return image_to_array(upsample(image_from_array(f, period), p)); },
        py::arg("f"), py::arg("p"), py::arg("period") = 1.0);

  m.def(
      "register_rigid",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> f,
         py::array_t<double, py::array::c_style | py::array::forcecast> g, double period,
         double max_shift, double epsilon_rel, int pad, int bands, double safety,
         std::uint64_t node_budget, bool single_resolution, const std::string& pipeline,
         bool rotation_only) {
        DiscreteImage fi = image_from_array(f, period);
        DiscreteImage gi = image_from_array(g, period);
        SearchConfig cfg = config_from_kwargs(epsilon_rel, pad, bands, safety, node_budget,
                                              single_resolution, pipeline);
        ResolutionPyramid pyr = build_pyramid(fi, gi, cfg);
        RegistrationProblem problem(pyr, !rotation_only);
        BnbResult res = branch_and_bound(problem, problem.default_box(max_shift * period));
        const RigidMotion motion = problem.motion(res.params);
        py::dict out;
        out["motion"] = motion;
        out["q_star"] = res.q_star;
        out["q_up"] = res.q_up;
        out["epsilon"] = pyr.epsilon;
        out["complete"] = res.complete;
        out["full_res_evals"] = res.stats.full_res_evals;
        out["cubes"] = res.stats.cubes_processed;
        return out;
      },
      py::arg("f"), py::arg("g"), py::arg("period") = 1.0, py::arg("max_shift") = 4.0,
      py::arg("epsilon_rel") = 0.01, py::arg("pad") = 2, py::arg("bands") = 32,
      py::arg("safety") = 1.02, py::arg("node_budget") = 10000000ull,
      py::arg("single_resolution") = false, py::arg("pipeline") = "upsampled",
      py::arg("rotation_only") = false,
      "Globally epsilon-optimal rigid registration via multiresolution branch and bound");

  m.def(
      "detect_symmetry",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> f, double period,
         double epsilon_rel, double alpha_range, std::uint64_t node_budget) {
        DiscreteImage fi = image_from_array(f, period);
        SearchConfig cfg;
        cfg.epsilon_rel = epsilon_rel;
        cfg.node_budget = node_budget;
        SymmetryResult res;
        if (alpha_range > 0) {
          ResolutionPyramid pyr = build_pyramid(fi, fi, cfg, true);
          SymmetryProblem problem(pyr);
          ParamBox box = problem.default_box();
          const int ai = fi.dims() == 2 ? 1 : 2;
          box.lo[ai] = -alpha_range * period;
          box.hi[ai] = alpha_range * period;
          BnbResult bnb = branch_and_bound(problem, box);
          res.params.dims = fi.dims();
          res.params.phi = bnb.params[0];
          if (fi.dims() == 3) res.params.psi = bnb.params[1];
          res.params.alpha_plane = bnb.params[ai];
          res.q_star = bnb.q_star;
          res.q_up = bnb.q_up;
          res.complete = bnb.complete;
        } else {
          res = detect_symmetry(fi, cfg);
        }
        py::dict out;
        out["phi"] = res.params.phi;
        out["psi"] = res.params.psi;
        out["alpha"] = res.params.alpha_plane;
        out["q_star"] = res.q_star;
        out["q_up"] = res.q_up;
        out["complete"] = res.complete;
        return out;
      },
      py::arg("f"), py::arg("period") = 1.0, py::arg("epsilon_rel") = 0.01,
      py::arg("alpha_range") = -1.0, py::arg("node_budget") = 10000000ull,
      "Best reflective-symmetry axis (2D) or plane (3D)");

  m.def("read_image",
        [](const std::string& path, bool invert) { return image_to_array(read_image(path, invert)); },
        py::arg("path"), py::arg("invert") = false);

  m.attr("__version__") = "1.0.0";
}
