#pragma once

// CSV export of the channel curves and the rate-distortion trace.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "mmt/channel.hpp"
#include "mmt/instance.hpp"
#include "mmt/rate_distortion.hpp"

namespace mmt {

/// Shortest decimal that parses back to the same double; "nan", "inf", "-inf"
/// for non-finite values.
std::string format_double(double x);
/// Inverse of format_double. Throws BadParams on malformed text.
double parse_double(std::string_view text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

/// Columns s, mse_mle, mse_mle_stderr, mmse, mmse_stderr, mi, mi_stderr.
CsvTable curves_table(const ChannelCurves& curves);
/// Columns lambda, rate, distortion_sq.
CsvTable rd_table(const RDCurve& curve);

/// 0 followed by `points` geometric values spanning [1e-2, 1e3] / diam^2.
std::vector<double> default_lambda_grid(const FiniteMetric& metric, std::size_t points = 48);

struct CurveExport {
  std::filesystem::path curves;
  std::filesystem::path rd;
};

/// Writes `path` (channel curves) and `<stem>_rd.csv` next to it (RD trace
/// under the instance prior). Throws IoError when a file cannot be written.
CurveExport export_curves(const Instance& inst, std::size_t grid_points, std::size_t samples, Seed seed,
                          const std::filesystem::path& path, double rd_tol = kDefaultCouplingTol);

}  // namespace mmt
