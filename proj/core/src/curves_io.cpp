#include "mmt/curves_io.hpp"

#include <charconv>
#include <limits>
#include <cmath>
#include <sstream>

#include "mmt/error.hpp"

namespace mmt {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw Error(ErrorCode::BadParams, "not a number: '" + std::string(text) + "'");
  return x;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t j = 0; j < table.header.size(); ++j) out += (j ? "," : "") + table.header[j];
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += format_double(row[j]);
    }
    out += "\r\n";
  }
  return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  bool first = true;
  while (!text.empty()) {
    std::size_t end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (first) {
      for (auto f : fields) table.header.emplace_back(f);
      first = false;
      continue;
    }
    if (fields.size() != table.header.size()) throw Error(ErrorCode::BadParams, "CSV row width differs from header");
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_double(f));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

CsvTable curves_table(const ChannelCurves& c) {
  CsvTable t;
  t.header = {"s", "mse_mle", "mse_mle_stderr", "mmse", "mmse_stderr", "mi", "mi_stderr"};
  for (std::size_t k = 0; k < c.mmse.grid.size(); ++k)
    t.rows.push_back({c.mmse.grid[k], c.mse_mle.values[k], c.mse_mle.std_errors[k], c.mmse.values[k],
                      c.mmse.std_errors[k], c.mi.values[k], c.mi.std_errors[k]});
  return t;
}

CsvTable rd_table(const RDCurve& curve) {
  CsvTable t;
  t.header = {"lambda", "rate", "distortion_sq"};
  for (const RDPoint& p : curve.points) t.rows.push_back({p.lambda, p.rate, p.distortion_sq});
  return t;
}

std::vector<double> default_lambda_grid(const FiniteMetric& metric, std::size_t points) {
  const double scale = metric.diam > 0.0 ? 1.0 / (metric.diam * metric.diam) : 1.0;
  std::vector<double> grid{0.0};
  if (points == 0) return grid;
  const double lo = std::log(1e-2), hi = std::log(1e3);
  for (std::size_t k = 0; k < points; ++k) {
    const double t = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    grid.push_back(scale * std::exp(t));
  }
  return grid;
}

CurveExport export_curves(const Instance& inst, std::size_t grid_points, std::size_t samples, Seed seed,
                          const std::filesystem::path& path, double rd_tol) {
  const EmbeddedProcess emb = inst.process();
  const Prior prior = inst.prior_law();
  const FiniteMetric metric = metric_of(emb);
  const auto grid = snr_grid(decay_certificate(metric), grid_points);
  const ChannelCurves curves = channel_curves(emb, prior, grid, samples, seed);
  const RDCurve rd = pareto_trace(metric, prior, default_lambda_grid(metric), rd_tol);

  CurveExport out;
  out.curves = path;
  out.rd = path.parent_path() / (path.stem().string() + "_rd.csv");
  write_text(out.curves, to_csv(curves_table(curves)));
  write_text(out.rd, to_csv(rd_table(rd)));
  return out;
}

}  // namespace mmt
