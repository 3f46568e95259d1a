#include "ut/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>

#include "ut/error.hpp"
#include "ut/io.hpp"
#include "ut/metrics.hpp"
#include "ut/parallel.hpp"
#include "ut/synth.hpp"
#include "ut/transform.hpp"

namespace ut::cli {
namespace {

io::MatrixFormat parse_format(const std::string& s) {
  if (s == "csv") return io::MatrixFormat::csv;
  if (s == "npy") return io::MatrixFormat::npy;
  return io::MatrixFormat::automatic;
}

void emit_json(const nlohmann::json& j, const std::string& output, std::ostream& out) {
  if (output == "-") {
    out << j.dump(2) << "\n";
  } else {
    io::write_text(output, j.dump(2) + "\n");
  }
}

struct Options {
  std::string input;
  std::string output;
  std::string model;
  std::string format = "auto";
  std::size_t threads = 0;

  // fit
  std::size_t grid_size = default_grid_size;
  double min_prominence = default_min_prominence;
  double lo = -4.0;
  double hi = 4.0;
  std::optional<double> bandwidth;
  bool edge_smoothing = false;
  double smoothing_temperature = 1.0;

  // hist
  std::size_t bins = 100;
  std::string svg_dir;

  // synth
  std::string spec;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::string factors_out;
  std::string truth_out;

  // metrics
  std::string factors;
  std::vector<std::string> metrics{"mig", "tc", "factor_vae", "correlation"};
  std::size_t mig_bins = default_mig_bins;
  std::size_t votes = default_votes;
  std::size_t batch = default_vote_batch;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uniform transform of Gaussian-mixture-shaped latent variables"};
  app.require_subcommand(1);
  Options o;

  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", o.threads, "Worker threads across dimensions (0 = all)");
  };

  auto* fit_cmd = app.add_subcommand("fit", "Fit per-dimension mixtures; writes a model JSON");
  fit_cmd->add_option("--input,-i", o.input, "Latent matrix (.csv or .npy)")->required();
  fit_cmd->add_option("--output,-o", o.output, "Model JSON path")->required();
  fit_cmd->add_option("--format", o.format, "Input format")->check(CLI::IsMember({"auto", "csv", "npy"}));
  fit_cmd->add_option("--grid-size", o.grid_size, "KDE grid points")->check(CLI::Range(std::size_t{16}, std::size_t{1} << 24));
  fit_cmd->add_option("--min-prominence", o.min_prominence, "Drop maxima below this fraction of the peak density")
      ->check(CLI::Range(0.0, 0.999999));
  fit_cmd->add_option("--lo", o.lo, "Lower end of the output range");
  fit_cmd->add_option("--hi", o.hi, "Upper end of the output range");
  fit_cmd->add_option("--bandwidth", o.bandwidth, "Fixed KDE bandwidth instead of Scott's rule");
  fit_cmd->add_flag("--edge-smoothing", o.edge_smoothing, "Use logistic component CDFs in the transform");
  fit_cmd->add_option("--smoothing-temperature", o.smoothing_temperature, "Temperature of the logistic smoothing");
  add_threads(fit_cmd);

  auto* transform_cmd = app.add_subcommand("transform", "Map a matrix through a fitted model");
  auto* inverse_cmd = app.add_subcommand("inverse", "Map transformed values back to the latent scale");
  for (auto* sub : {transform_cmd, inverse_cmd}) {
    sub->add_option("--model,-m", o.model, "Model JSON")->required();
    sub->add_option("--input,-i", o.input, "Input matrix")->required();
    sub->add_option("--output,-o", o.output, "Output CSV")->required();
    sub->add_option("--format", o.format, "Input format")->check(CLI::IsMember({"auto", "csv", "npy"}));
    add_threads(sub);
  }

  auto* report_cmd = app.add_subcommand("report", "Summarize a fitted model as JSON");
  report_cmd->add_option("--model,-m", o.model, "Model JSON")->required();
  report_cmd->add_option("--output,-o", o.output, "Report JSON path ('-' for stdout)")->required();

  auto* hist_cmd = app.add_subcommand("hist", "Clustered histograms of a matrix under a model");
  hist_cmd->add_option("--input,-i", o.input, "Latent matrix")->required();
  hist_cmd->add_option("--model,-m", o.model, "Model JSON")->required();
  hist_cmd->add_option("--output,-o", o.output, "Histogram JSON path ('-' for stdout)")->required();
  hist_cmd->add_option("--bins", o.bins, "Equal-width bins per dimension")->check(CLI::PositiveNumber);
  hist_cmd->add_option("--svg", o.svg_dir, "Also write one SVG bar chart per dimension into this directory");
  hist_cmd->add_option("--format", o.format, "Input format")->check(CLI::IsMember({"auto", "csv", "npy"}));

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic latent dataset from a spec");
  synth_cmd->add_option("--spec", o.spec, "Spec JSON")->required();
  synth_cmd->add_option("--output,-o", o.output, "Latent CSV")->required();
  synth_cmd->add_option("--n", o.n, "Row count (overrides the spec)");
  synth_cmd->add_option("--seed", o.seed, "Seed (overrides the spec)");
  synth_cmd->add_option("--factors-out", o.factors_out, "Factor label CSV");
  synth_cmd->add_option("--truth-out", o.truth_out, "Ground-truth mixtures JSON");

  auto* metrics_cmd = app.add_subcommand("metrics", "Disentanglement metrics for latents and factor labels");
  metrics_cmd->add_option("--input,-i", o.input, "Latent matrix")->required();
  metrics_cmd->add_option("--factors,-f", o.factors, "Factor label CSV")->required();
  metrics_cmd->add_option("--output,-o", o.output, "Report JSON path ('-' for stdout)")->required();
  metrics_cmd->add_option("--metrics", o.metrics, "Subset of mig,tc,factor_vae,correlation")
      ->delimiter(',')
      ->check(CLI::IsMember({"mig", "tc", "factor_vae", "correlation"}));
  metrics_cmd->add_option("--mig-bins", o.mig_bins, "Equal-count bins for MIG")->check(CLI::PositiveNumber);
  metrics_cmd->add_option("--votes", o.votes, "FactorVAE votes");
  metrics_cmd->add_option("--batch", o.batch, "FactorVAE batch size");
  metrics_cmd->add_option("--seed", o.seed, "FactorVAE seed");
  metrics_cmd->add_option("--format", o.format, "Input format")->check(CLI::IsMember({"auto", "csv", "npy"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage_error;
  }

  try {
    if (*fit_cmd) {
      FitConfig cfg;
      cfg.grid_size = o.grid_size;
      cfg.min_prominence_fraction = o.min_prominence;
      cfg.lo = o.lo;
      cfg.hi = o.hi;
      cfg.bandwidth_override = o.bandwidth;
      cfg.smoothing = {o.edge_smoothing, o.smoothing_temperature};
      try {
        cfg.validate();
      } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
      }
      const auto samples = io::read_matrix(o.input, parse_format(o.format));
      const auto model = fit(samples, cfg, o.threads);
      io::write_model(model, o.output);
      std::size_t collapsed = 0;
      for (const auto& m : model.dimensions) collapsed += m.collapsed();
      err << "fitted " << model.dimensions.size() << " dimensions from " << model.rows << " rows";
      if (collapsed) err << " (" << collapsed << " collapsed)";
      err << "\n";
    } else if (*transform_cmd || *inverse_cmd) {
      const auto model = io::read_model(o.model);
      const auto samples = io::read_matrix(o.input, parse_format(o.format));
      const auto result = *transform_cmd ? apply(model, samples, o.threads) : invert(model, samples, o.threads);
      io::write_matrix(result, o.output);
    } else if (*report_cmd) {
      emit_json(io::model_report(io::read_model(o.model)), o.output, out);
    } else if (*hist_cmd) {
      const auto model = io::read_model(o.model);
      const auto samples = io::read_matrix(o.input, parse_format(o.format));
      const auto hist = io::export_histogram(samples, model, o.bins);
      emit_json(io::histogram_to_json(hist), o.output, out);
      if (!o.svg_dir.empty()) {
        std::filesystem::create_directories(o.svg_dir);
        for (std::size_t d = 0; d < hist.dimensions.size(); ++d) {
          io::write_text(std::filesystem::path(o.svg_dir) / ("hist_dim" + std::to_string(d) + ".svg"),
                         io::histogram_svg(hist.dimensions[d], d));
        }
      }
    } else if (*synth_cmd) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(io::read_text(o.spec));
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse, o.spec + ": " + e.what());
      }
      if (o.n) j["n"] = *o.n;
      if (o.seed) j["seed"] = *o.seed;
      const auto data = synth::generate(io::spec_from_json(j));
      io::write_matrix(data.latents, o.output);
      if (!o.factors_out.empty()) io::write_factors(data.factors, o.factors_out);
      if (!o.truth_out.empty()) io::write_text(o.truth_out, io::truth_to_json(data).dump(2) + "\n");
    } else if (*metrics_cmd) {
      const auto latents = io::read_matrix(o.input, parse_format(o.format));
      const auto factors = io::read_factors(o.factors);
      MetricSelection sel{false, false, false, false};
      for (const auto& m : o.metrics) {
        sel.mig |= m == "mig";
        sel.tc |= m == "tc";
        sel.factor_vae |= m == "factor_vae";
        sel.correlation |= m == "correlation";
      }
      FactorVaeOptions fv{o.votes, o.batch, o.seed.value_or(0)};
      const auto report = compute_metrics(latents, factors, sel, o.mig_bins, fv);
      for (const auto& w : report.warnings) err << "warning: " << w << "\n";
      emit_json(io::metric_report_to_json(report), o.output, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::numeric ? numeric_error : data_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return data_error;
  }
  return ok;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ut::cli
