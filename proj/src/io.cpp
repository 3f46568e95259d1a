#include "ut/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ut/cluster.hpp"
#include "ut/error.hpp"

namespace ut::io {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

// Visits every non-blank data line after the header as (1-based line number, cells).
template <class F>
std::size_t for_each_row(const std::string& text, F&& visit) {
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string_view line = trim(std::string_view(text).substr(pos, nl - pos));
    ++line_no;
    pos = nl + 1;
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (!header_seen) {
      header_seen = true;
      width = cells.size();
      continue;
    }
    if (cells.size() != width) {
      fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                                 " cells, found " + std::to_string(cells.size()));
    }
    visit(line_no, cells);
  }
  if (!header_seen) fail(ErrorKind::parse, "empty CSV: missing header row");
  return width;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string cell_error(std::size_t line, std::size_t col, std::string_view cell, const char* what) {
  return "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what + " '" +
         std::string(cell) + "'";
}

json component_json(const GaussianComponent& c) {
  return {{"weight", c.weight}, {"mean", c.mean}, {"variance", c.variance}};
}

GaussianComponent component_from_json(const json& j) {
  return {j.at("weight").get<double>(), j.at("mean").get<double>(), j.at("variance").get<double>()};
}

}  // namespace

SampleMatrix parse_csv(const std::string& text) {
  std::vector<std::vector<double>> columns;
  const std::size_t width = for_each_row(text, [&](std::size_t line, const auto& cells) {
    if (columns.empty()) columns.resize(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto cell = cells[c];
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        fail(ErrorKind::parse, cell_error(line, c, cell, "non-numeric cell"));
      }
      if (!std::isfinite(v)) fail(ErrorKind::parse, cell_error(line, c, cell, "non-finite cell"));
      columns[c].push_back(v);
    }
  });
  if (columns.empty()) return SampleMatrix(0, width);
  return SampleMatrix::from_columns(columns);
}

std::string format_csv(const SampleMatrix& m, const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (c) out += ',';
    out += c < header.size() ? header[c] : "z" + std::to_string(c);
  }
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

SampleMatrix parse_npy(const std::string& bytes) {
  static constexpr char magic[] = "\x93NUMPY";
  if (bytes.size() < 10 || bytes.compare(0, 6, magic, 6) != 0) {
    fail(ErrorKind::parse, "offset 0: not an NPY file");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t offset = 0;
  auto byte = [&](std::size_t i) { return static_cast<std::size_t>(static_cast<unsigned char>(bytes[i])); };
  if (major == 1) {
    header_len = byte(8) | byte(9) << 8;
    offset = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) fail(ErrorKind::parse, "offset 8: truncated NPY header");
    header_len = byte(8) | byte(9) << 8 | byte(10) << 16 | byte(11) << 24;
    offset = 12;
  } else {
    fail(ErrorKind::parse, "offset 6: unsupported NPY version " + std::to_string(major));
  }
  if (bytes.size() < offset + header_len) fail(ErrorKind::parse, "offset " + std::to_string(offset) + ": truncated NPY header");
  const std::string header = bytes.substr(offset, header_len);
  const std::size_t data_offset = offset + header_len;

  auto value_of = [&](const std::string& key) -> std::string {
    const auto k = header.find("'" + key + "'");
    if (k == std::string::npos) fail(ErrorKind::parse, "offset " + std::to_string(offset) + ": NPY header lacks '" + key + "'");
    auto colon = header.find(':', k);
    auto start = header.find_first_not_of(' ', colon + 1);
    return header.substr(start);
  };

  const std::string descr = value_of("descr");
  std::size_t width = 0;
  if (descr.rfind("'<f8'", 0) == 0) {
    width = 8;
  } else if (descr.rfind("'<f4'", 0) == 0) {
    width = 4;
  } else {
    fail(ErrorKind::parse, "offset " + std::to_string(offset) + ": unsupported NPY dtype " + descr.substr(0, descr.find(',')));
  }
  if (value_of("fortran_order").rfind("False", 0) != 0) {
    fail(ErrorKind::parse, "offset " + std::to_string(offset) + ": Fortran-order NPY arrays are not supported");
  }
  const std::string shape_text = value_of("shape");
  const auto close = shape_text.find(')');
  if (shape_text.empty() || shape_text[0] != '(' || close == std::string::npos) {
    fail(ErrorKind::parse, "offset " + std::to_string(offset) + ": malformed NPY shape");
  }
  std::vector<std::size_t> shape;
  {
    std::string inner = shape_text.substr(1, close - 1);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto t = trim(item);
      if (t.empty()) continue;
      std::size_t v = 0;
      const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
      if (res.ec != std::errc()) fail(ErrorKind::parse, "offset " + std::to_string(offset) + ": malformed NPY shape");
      shape.push_back(v);
    }
  }
  if (shape.size() != 2) fail(ErrorKind::parse, "expected 2-D array, got " + std::to_string(shape.size()) + "-D");

  const std::size_t rows = shape[0];
  const std::size_t cols = shape[1];
  if (bytes.size() < data_offset + rows * cols * width) {
    fail(ErrorKind::parse, "offset " + std::to_string(data_offset) + ": NPY data shorter than shape implies");
  }
  SampleMatrix m(rows, cols);
  const char* p = bytes.data() + data_offset;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0.0;
      // Assumes a little-endian host, as does every supported platform.
      if (width == 8) {
        std::memcpy(&v, p, 8);
      } else {
        float f = 0.0f;
        std::memcpy(&f, p, 4);
        v = f;
      }
      if (!std::isfinite(v)) {
        fail(ErrorKind::parse, "offset " + std::to_string(p - bytes.data()) + ": non-finite value at row " +
                                   std::to_string(r) + ", column " + std::to_string(c));
      }
      m(r, c) = v;
      p += width;
    }
  }
  return m;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::parse, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::parse, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::parse, "write failed for " + path.string());
}

SampleMatrix read_matrix(const std::filesystem::path& path, MatrixFormat format) {
  if (format == MatrixFormat::automatic) {
    format = path.extension() == ".npy" ? MatrixFormat::npy : MatrixFormat::csv;
  }
  const std::string text = read_text(path);
  try {
    return format == MatrixFormat::npy ? parse_npy(text) : parse_csv(text);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_matrix(const SampleMatrix& m, const std::filesystem::path& path,
                  const std::vector<std::string>& header) {
  write_text(path, format_csv(m, header));
}

FactorLabels parse_factor_csv(const std::string& text) {
  std::vector<std::vector<std::int64_t>> columns;
  const std::size_t width = for_each_row(text, [&](std::size_t line, const auto& cells) {
    if (columns.empty()) columns.resize(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto cell = cells[c];
      std::int64_t v = 0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        fail(ErrorKind::parse, cell_error(line, c, cell, "non-integer label"));
      }
      if (v < 0) fail(ErrorKind::parse, cell_error(line, c, cell, "negative label"));
      columns[c].push_back(v);
    }
  });
  if (columns.empty()) return FactorLabels(0, width);
  return FactorLabels::from_columns(columns);
}

FactorLabels read_factors(const std::filesystem::path& path) {
  try {
    return parse_factor_csv(read_text(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string format_factor_csv(const FactorLabels& f) {
  std::string out;
  for (std::size_t c = 0; c < f.factors(); ++c) {
    if (c) out += ',';
    out += "y" + std::to_string(c);
  }
  out += '\n';
  for (std::size_t r = 0; r < f.rows(); ++r) {
    for (std::size_t c = 0; c < f.factors(); ++c) {
      if (c) out += ',';
      out += std::to_string(f(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_factors(const FactorLabels& f, const std::filesystem::path& path) {
  write_text(path, format_factor_csv(f));
}

json model_to_json(const UtModel& model) {
  const auto& cfg = model.config;
  json j;
  j["format_version"] = model_format_version;
  j["fit_config"] = {
      {"grid_size", cfg.grid_size},
      {"min_prominence_fraction", cfg.min_prominence_fraction},
      {"range", {cfg.lo, cfg.hi}},
      {"bandwidth_override", cfg.bandwidth_override ? json(*cfg.bandwidth_override) : json(nullptr)},
      {"edge_smoothing", cfg.smoothing.enabled},
      {"smoothing_temperature", cfg.smoothing.temperature},
  };
  j["provenance"] = {{"rows", model.rows}, {"cols", model.cols}};
  json dims = json::array();
  for (std::size_t d = 0; d < model.dimensions.size(); ++d) {
    const auto& m = model.dimensions[d];
    json comps = json::array();
    for (const auto& c : m.components()) comps.push_back(component_json(c));
    json dim = {
        {"components", comps},
        {"thresholds", m.thresholds()},
        {"bandwidth", m.bandwidth()},
        {"sample_count", m.sample_count()},
        {"collapsed", m.collapsed()},
    };
    if (d < model.diagnostics.size()) {
      const auto& diag = model.diagnostics[d];
      dim["constant"] = diag.constant;
      dim["dropped_clusters"] = diag.dropped_clusters;
      dim["smallest_cluster"] = diag.smallest_cluster;
    }
    dims.push_back(std::move(dim));
  }
  j["dimensions"] = std::move(dims);
  return j;
}

UtModel model_from_json(const json& j) {
  try {
    const json& version = j.at("format_version");
    const std::string v = version.is_string() ? version.get<std::string>() : version.dump();
    if (v != model_format_version) {
      fail(ErrorKind::version, "unsupported model format_version " + v + " (expected " + model_format_version + ")");
    }
    UtModel model;
    const json& cfg = j.at("fit_config");
    model.config.grid_size = cfg.at("grid_size").get<std::size_t>();
    model.config.min_prominence_fraction = cfg.at("min_prominence_fraction").get<double>();
    model.config.lo = cfg.at("range").at(0).get<double>();
    model.config.hi = cfg.at("range").at(1).get<double>();
    if (cfg.contains("bandwidth_override") && !cfg["bandwidth_override"].is_null()) {
      model.config.bandwidth_override = cfg["bandwidth_override"].get<double>();
    }
    model.config.smoothing.enabled = cfg.value("edge_smoothing", false);
    model.config.smoothing.temperature = cfg.value("smoothing_temperature", 1.0);
    try {
      model.config.validate();
    } catch (const Error& e) {
      fail(ErrorKind::integrity, std::string("fit_config: ") + e.what());
    }
    if (j.contains("provenance")) {
      model.rows = j["provenance"].value("rows", std::size_t{0});
      model.cols = j["provenance"].value("cols", std::size_t{0});
    }
    const json& dims = j.at("dimensions");
    for (std::size_t d = 0; d < dims.size(); ++d) {
      const json& dim = dims[d];
      std::vector<GaussianComponent> comps;
      for (const auto& c : dim.at("components")) comps.push_back(component_from_json(c));
      try {
        model.dimensions.emplace_back(std::move(comps), dim.at("thresholds").get<std::vector<double>>(),
                                      dim.at("bandwidth").get<double>(),
                                      dim.at("sample_count").get<std::size_t>(),
                                      dim.at("collapsed").get<bool>(), 1e-9);
      } catch (const Error& e) {
        fail(ErrorKind::integrity, "dimensions[" + std::to_string(d) + "]: " + e.what());
      }
      DimensionDiagnostics diag;
      diag.constant = dim.value("constant", false);
      diag.dropped_clusters = dim.value("dropped_clusters", std::size_t{0});
      diag.smallest_cluster = dim.value("smallest_cluster", std::size_t{0});
      model.diagnostics.push_back(diag);
    }
    if (model.cols == 0) model.cols = model.dimensions.size();
    if (model.cols != model.dimensions.size()) {
      fail(ErrorKind::integrity, "provenance.cols does not match the number of dimensions");
    }
    return model;
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, std::string("malformed model JSON: ") + e.what());
  }
}

void write_model(const UtModel& model, const std::filesystem::path& path) {
  write_text(path, model_to_json(model).dump(2) + "\n");
}

UtModel read_model(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, path.string() + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

json model_report(const UtModel& model) {
  json dims = json::array();
  for (std::size_t d = 0; d < model.dimensions.size(); ++d) {
    const auto& m = model.dimensions[d];
    json comps = json::array();
    for (const auto& c : m.components()) comps.push_back(component_json(c));
    json entry = {{"dimension", d},     {"k", m.k()},
                  {"components", comps}, {"thresholds", m.thresholds()},
                  {"bandwidth", m.bandwidth()}, {"collapsed", m.collapsed()}};
    if (d < model.diagnostics.size()) {
      entry["constant"] = model.diagnostics[d].constant;
      entry["dropped_clusters"] = model.diagnostics[d].dropped_clusters;
      entry["smallest_cluster"] = model.diagnostics[d].smallest_cluster;
    }
    dims.push_back(std::move(entry));
  }
  std::size_t collapsed = 0;
  for (const auto& m : model.dimensions) collapsed += m.collapsed();
  return {{"dimensions", dims}, {"collapsed_dimensions", collapsed}, {"rows", model.rows}};
}

HistogramExport export_histogram(const SampleMatrix& samples, const UtModel& model, std::size_t bins) {
  if (samples.cols() != model.dimensions.size()) {
    fail(ErrorKind::shape, "matrix has " + std::to_string(samples.cols()) + " columns, model has " +
                               std::to_string(model.dimensions.size()));
  }
  if (bins < 1) fail(ErrorKind::invalid_input, "bins must be positive");
  HistogramExport out;
  out.bins = bins;
  for (std::size_t d = 0; d < samples.cols(); ++d) {
    const auto col = samples.column(d);
    const auto& m = model.dimensions[d];
    DimensionHistogram h;
    h.k = m.k();
    h.collapsed = m.collapsed();
    h.counts.assign(h.k, std::vector<std::size_t>(bins, 0));

    double lo = 0.0;
    double hi = 1.0;
    if (!col.empty()) {
      const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
      lo = *mn;
      hi = *mx;
    }
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(b == bins ? hi : lo + width * static_cast<double>(b));

    for (double z : col) {
      auto b = static_cast<std::size_t>(std::floor((z - lo) / width));
      b = std::min(b, bins - 1);
      const auto k = static_cast<std::size_t>(cluster_of(z, m.thresholds()) - 1);
      ++h.counts[k][b];
    }
    out.dimensions.push_back(std::move(h));
  }
  return out;
}

json histogram_to_json(const HistogramExport& h) {
  json dims = json::array();
  for (const auto& d : h.dimensions) {
    dims.push_back({{"edges", d.edges}, {"counts", d.counts}, {"k", d.k}, {"collapsed", d.collapsed}});
  }
  return {{"bins", h.bins}, {"dimensions", dims}};
}

std::string histogram_svg(const DimensionHistogram& h, std::size_t dimension) {
  static constexpr const char* palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                            "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
  constexpr double width = 640.0;
  constexpr double height = 320.0;
  constexpr double margin = 30.0;
  const std::size_t bins = h.edges.size() - 1;

  std::size_t tallest = 1;
  for (std::size_t b = 0; b < bins; ++b) {
    std::size_t total = 0;
    for (const auto& row : h.counts) total += row[b];
    tallest = std::max(tallest, total);
  }
  const double bar = (width - 2 * margin) / static_cast<double>(bins);
  const double scale = (height - 2 * margin) / static_cast<double>(tallest);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  svg << "<text x=\"" << margin << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">dimension "
      << dimension << ", K=" << h.k << (h.collapsed ? " (collapsed)" : "") << "</text>\n";
  for (std::size_t b = 0; b < bins; ++b) {
    double y = height - margin;
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      const double len = static_cast<double>(h.counts[k][b]) * scale;
      if (len <= 0.0) continue;
      y -= len;
      svg << "<rect x=\"" << margin + bar * static_cast<double>(b) << "\" y=\"" << y << "\" width=\"" << bar
          << "\" height=\"" << len << "\" fill=\"" << palette[k % std::size(palette)] << "\"/>\n";
    }
  }
  svg << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << margin << "\" y=\"" << height - 8 << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(h.edges.front()) << "</text>\n";
  svg << "<text x=\"" << width - margin << "\" y=\"" << height - 8
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(h.edges.back())
      << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

synth::SynthSpec spec_from_json(const json& j) {
  synth::SynthSpec spec;
  std::string path;
  try {
    path = "n";
    spec.n = j.value("n", std::size_t{1});
    path = "seed";
    spec.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("factors")) {
      const auto& fs = j.at("factors");
      for (std::size_t f = 0; f < fs.size(); ++f) {
        path = "factors[" + std::to_string(f) + "]";
        synth::FactorSpec s;
        s.cardinality = fs[f].at("cardinality").get<std::int64_t>();
        if (fs[f].contains("weights")) s.weights = fs[f]["weights"].get<std::vector<double>>();
        spec.factors.push_back(std::move(s));
      }
    }
    const auto& dims = j.at("dimensions");
    for (std::size_t d = 0; d < dims.size(); ++d) {
      path = "dimensions[" + std::to_string(d) + "]";
      const auto& dim = dims[d];
      const std::string type = dim.at("type").get<std::string>();
      if (type == "mixture") {
        synth::Mixture m;
        for (const auto& c : dim.at("components")) m.components.push_back(component_from_json(c));
        spec.dimensions.emplace_back(std::move(m));
      } else if (type == "periodic") {
        spec.dimensions.emplace_back(synth::Periodic{dim.at("period").get<double>(), dim.value("noise", 0.0)});
      } else if (type == "constant") {
        spec.dimensions.emplace_back(synth::Constant{dim.at("value").get<double>()});
      } else if (type == "factor_copy") {
        spec.dimensions.emplace_back(
            synth::FactorCopy{dim.at("factor").get<std::size_t>(), dim.value("noise", 0.0)});
      } else {
        fail(ErrorKind::spec, path + ".type: unknown generator '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::spec, (path.empty() ? std::string("spec") : path) + ": " + e.what());
  }
  spec.validate();
  return spec;
}

json truth_to_json(const synth::Dataset& data) {
  json dims = json::array();
  for (const auto& t : data.truth) {
    if (!t) {
      dims.push_back(nullptr);
      continue;
    }
    json comps = json::array();
    for (const auto& c : t->components()) comps.push_back(component_json(c));
    dims.push_back({{"components", comps}, {"thresholds", t->thresholds()}});
  }
  return {{"dimensions", dims}, {"cardinalities", data.factors.cardinalities()}};
}

json metric_report_to_json(const MetricReport& report) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j = {
      {"mig", opt(report.mig)},
      {"tc", opt(report.tc)},
      {"factor_vae_score", opt(report.factor_vae_score)},
      {"beta_vae", nullptr},
      {"tmc", nullptr},
      {"warnings", report.warnings},
  };
  if (report.correlation) {
    const auto& c = *report.correlation;
    json rows = json::array();
    for (std::size_t l = 0; l < c.latents; ++l) {
      json row = json::array();
      for (std::size_t f = 0; f < c.factors; ++f) row.push_back(c.at(l, f));
      rows.push_back(std::move(row));
    }
    j["correlation"] = {{"matrix", rows},
                        {"zero_variance_latents", c.zero_variance_latents},
                        {"zero_variance_factors", c.zero_variance_factors}};
  } else {
    j["correlation"] = nullptr;
  }
  return j;
}

}  // namespace ut::io
