#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "ut/error.hpp"
#include "ut/io.hpp"
#include "ut/kde.hpp"
#include "ut/metrics.hpp"
#include "ut/mixture.hpp"
#include "ut/synth.hpp"
#include "ut/transform.hpp"

namespace py = pybind11;
using namespace ut;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const DoubleArray& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

SampleMatrix to_matrix(const DoubleArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array of shape (rows, cols)");
  const auto rows = static_cast<std::size_t>(a.shape(0)), cols = static_cast<std::size_t>(a.shape(1));
  SampleMatrix m(rows, cols);
  auto v = a.unchecked<2>();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = v(r, c);
  return m;
}

FactorLabels to_labels(const LabelArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D label array of shape (rows, factors)");
  auto v = a.unchecked<2>();
  std::vector<std::vector<std::int64_t>> cols(a.shape(1), std::vector<std::int64_t>(a.shape(0)));
  for (py::ssize_t r = 0; r < a.shape(0); ++r)
    for (py::ssize_t f = 0; f < a.shape(1); ++f) cols[f][r] = v(r, f);
  return FactorLabels::from_columns(cols);
}

py::array_t<double> from_matrix(const SampleMatrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) v(r, c) = m(r, c);
  return out;
}

py::array_t<std::int64_t> from_labels(const FactorLabels& f) {
  py::array_t<std::int64_t> out({f.rows(), f.factors()});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t r = 0; r < f.rows(); ++r)
    for (std::size_t c = 0; c < f.factors(); ++c) v(r, c) = f(r, c);
  return out;
}

py::array_t<double> from_vector(const std::vector<double>& v) {
  py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

MixtureModel mixture_from_tuples(const std::vector<std::tuple<double, double, double>>& comps) {
  std::vector<GaussianComponent> out;
  for (const auto& [w, m, v] : comps) out.push_back({w, m, v});
  return MixtureModel::from_components(std::move(out));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Uniform transform of latent variables: G-KDE clustering, mixture PIT and metrics.";

  static py::exception<Error> ut_error(m, "UtError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(ut_error.ptr(), e.what());
    }
  });

  m.def("scott_bandwidth", [](const DoubleArray& x) { return scott_bandwidth(to_vector(x)).value; }, py::arg("samples"));
  m.def("gaussian_kernel", py::vectorize(gaussian_kernel), py::arg("u"));
  m.def(
      "estimate_density",
      [](const DoubleArray& x, std::size_t grid_size, std::optional<double> bandwidth) {
        const auto d = estimate_density(to_vector(x), grid_size, bandwidth);
        return py::make_tuple(from_vector(d.grid), from_vector(d.density), d.bandwidth);
      },
      py::arg("samples"), py::arg("grid_size") = default_grid_size, py::arg("bandwidth") = py::none(),
      "Returns (grid, density, bandwidth).");

  py::class_<MixtureModel>(m, "Mixture")
      .def(py::init(&mixture_from_tuples), py::arg("components"),
           "Build from (weight, mean, variance) tuples; thresholds at midpoints.")
      .def_property_readonly("components",
                             [](const MixtureModel& mm) {
                               std::vector<std::tuple<double, double, double>> out;
                               for (const auto& c : mm.components()) out.emplace_back(c.weight, c.mean, c.variance);
                               return out;
                             })
      .def_property_readonly("thresholds", &MixtureModel::thresholds)
      .def_property_readonly("bandwidth", &MixtureModel::bandwidth)
      .def_property_readonly("collapsed", &MixtureModel::collapsed)
      .def_property_readonly("k", &MixtureModel::k)
      .def("pdf", [](const MixtureModel& mm, const DoubleArray& z) {
        return py::vectorize([&mm](double v) { return mm.pdf(v); })(z);
      })
      .def("cdf", [](const MixtureModel& mm, const DoubleArray& z) {
        return py::vectorize([&mm](double v) { return mm.cdf(v); })(z);
      })
      .def("quantile", [](const MixtureModel& mm, const DoubleArray& p) {
        return py::vectorize([&mm](double v) { return mm.quantile(v); })(p);
      })
      .def("sample", [](const MixtureModel& mm, std::size_t count, std::uint64_t seed) {
        return from_vector(mixture_sample(mm, count, seed));
      }, py::arg("count"), py::arg("seed"))
      .def("__repr__", [](const MixtureModel& mm) { return "<Mixture k=" + std::to_string(mm.k()) + ">"; });

  py::class_<UtModel>(m, "Model")
      .def_property_readonly("dimensions", [](const UtModel& um) { return um.dimensions; })
      .def_property_readonly("shape", [](const UtModel& um) { return py::make_tuple(um.rows, um.cols); })
      .def_property_readonly("range", [](const UtModel& um) { return py::make_tuple(um.config.lo, um.config.hi); })
      .def("to_json", [](const UtModel& um) { return io::model_to_json(um).dump(2); })
      .def_static("from_json", [](const std::string& s) {
        try {
          return io::model_from_json(nlohmann::json::parse(s));
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorKind::parse, e.what());
        }
      })
      .def("report", [](const UtModel& um) { return io::model_report(um).dump(2); })
      .def("__repr__", [](const UtModel& um) { return "<Model cols=" + std::to_string(um.cols) + ">"; });

  m.def(
      "fit",
      [](const DoubleArray& samples, std::size_t grid_size, double min_prominence, double lo, double hi,
         std::optional<double> bandwidth, bool edge_smoothing, double smoothing_temperature, std::size_t threads) {
        FitConfig cfg;
        cfg.grid_size = grid_size;
        cfg.min_prominence_fraction = min_prominence;
        cfg.lo = lo;
        cfg.hi = hi;
        cfg.bandwidth_override = bandwidth;
        cfg.smoothing = {edge_smoothing, smoothing_temperature};
        const auto mat = to_matrix(samples);
        py::gil_scoped_release release;
        return fit(mat, cfg, threads);
      },
      py::arg("samples"), py::arg("grid_size") = default_grid_size, py::arg("min_prominence") = default_min_prominence,
      py::arg("lo") = -4.0, py::arg("hi") = 4.0, py::arg("bandwidth") = py::none(), py::arg("edge_smoothing") = false,
      py::arg("smoothing_temperature") = 1.0, py::arg("threads") = 1);
  m.def(
      "apply",
      [](const UtModel& model, const DoubleArray& samples, std::size_t threads) {
        const auto mat = to_matrix(samples);
        SampleMatrix out;
        {
          py::gil_scoped_release release;
          out = apply(model, mat, threads);
        }
        return from_matrix(out);
      },
      py::arg("model"), py::arg("samples"), py::arg("threads") = 1);
  m.def(
      "invert",
      [](const UtModel& model, const DoubleArray& transformed, std::size_t threads) {
        const auto mat = to_matrix(transformed);
        SampleMatrix out;
        {
          py::gil_scoped_release release;
          out = invert(model, mat, threads);
        }
        return from_matrix(out);
      },
      py::arg("model"), py::arg("transformed"), py::arg("threads") = 1);
  m.def("read_model", &io::read_model, py::arg("path"));
  m.def("write_model", &io::write_model, py::arg("model"), py::arg("path"));

  m.def(
      "mig",
      [](const DoubleArray& latents, const LabelArray& factors, std::size_t bins) {
        return mig(to_matrix(latents), to_labels(factors), bins);
      },
      py::arg("latents"), py::arg("factors"), py::arg("bins") = default_mig_bins);
  m.def(
      "total_correlation", [](const DoubleArray& latents) { return total_correlation(to_matrix(latents)); },
      py::arg("latents"));
  m.def(
      "factor_vae_score",
      [](const DoubleArray& latents, const LabelArray& factors, std::size_t votes, std::size_t batch,
         std::uint64_t seed) { return factor_vae_score(to_matrix(latents), to_labels(factors), {votes, batch, seed}); },
      py::arg("latents"), py::arg("factors"), py::arg("votes") = default_votes, py::arg("batch") = default_vote_batch,
      py::arg("seed") = 0);
  m.def(
      "correlation_heatmap",
      [](const DoubleArray& latents, const LabelArray& factors) {
        const auto r = correlation_heatmap(to_matrix(latents), to_labels(factors));
        py::array_t<double> out({r.latents, r.factors});
        std::copy(r.values.begin(), r.values.end(), out.mutable_data());
        return out;
      },
      py::arg("latents"), py::arg("factors"));
  m.def(
      "ks_uniform", [](const DoubleArray& x, double lo, double hi) { return ks_uniform(to_vector(x), lo, hi); },
      py::arg("samples"), py::arg("lo") = -4.0, py::arg("hi") = 4.0);

  m.def(
      "synth",
      [](const std::string& spec_json) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(spec_json);
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorKind::parse, e.what());
        }
        const auto data = synth::generate(io::spec_from_json(j));
        return py::make_tuple(from_matrix(data.latents), from_labels(data.factors), data.truth);
      },
      py::arg("spec_json"), "Returns (latents, factors, truth) where truth holds a Mixture or None per dimension.");
}
