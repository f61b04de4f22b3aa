// mmt-lab: generate instances, run audits, export curves.

#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmt/audit.hpp"
#include "mmt/curves_io.hpp"
#include "mmt/error.hpp"
#include "mmt/functionals.hpp"
#include "mmt/instance.hpp"

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::string out;
  std::optional<double> tol;
  std::string checks;
  std::string format = "json";
};

std::set<std::string> parse_checks(const std::string& list) {
  std::set<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(item);
  return out;
}

mmt::Instance load(const std::string& path, const Globals& g) {
  mmt::Instance inst = mmt::load_instance(path);
  if (g.seed) inst.seed = *g.seed;
  return inst;
}

void emit(const std::string& text, const Globals& g) {
  if (g.out.empty())
    std::cout << text;
  else
    mmt::write_text(g.out, text);
}

void emit_table(const mmt::CsvTable& table, const Globals& g) {
  if (g.format == "csv") {
    emit(mmt::to_csv(table), g);
    return;
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj;
    for (std::size_t j = 0; j < row.size(); ++j)
      obj[table.header[j]] = std::isfinite(row[j]) ? nlohmann::json(row[j]) : nlohmann::json(mmt::format_double(row[j]));
    rows.push_back(obj);
  }
  emit(rows.dump(2) + "\n", g);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Majorizing-measure numerical laboratory"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed (overrides the instance seed)");
  app.add_option("--samples", g.samples, "Monte Carlo samples per estimate");
  app.add_option("--out", g.out, "Output path");
  app.add_option("--tol", g.tol, "Marginal tolerance of the coupling solver")->check(CLI::PositiveNumber);
  app.add_option("--checks", g.checks, "Comma-separated check ids (default: all)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  std::string family = "cloud";
  std::size_t size = 8, dim = 8;
  double distance = 1.0;
  auto* gen = app.add_subcommand("gen", "Generate an instance file")->fallthrough();
  gen->add_option("--family", family, "two_point|orthonormal|simplex|cloud|ultrametric")
      ->check(CLI::IsMember({"two_point", "orthonormal", "simplex", "cloud", "ultrametric"}));
  gen->add_option("--size", size, "Number of points");
  gen->add_option("--dim", dim, "Ambient dimension");
  gen->add_option("--distance", distance, "two_point separation");

  std::string instance_path;
  std::size_t grid_points = mmt::kDefaultGridPoints;
  auto* audit = app.add_subcommand("audit", "Run the audit suite and store the report")->fallthrough();
  audit->add_option("instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
  audit->add_option("--grid-points", grid_points, "SNR grid points");
  auto* curves = app.add_subcommand("curves", "Export MLE/MMSE/MI curves and the RD trace as CSV")->fallthrough();
  curves->add_option("instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
  curves->add_option("--grid-points", grid_points, "SNR grid points");
  auto* rd = app.add_subcommand("rd", "Print the rate-distortion trace")->fallthrough();
  rd->add_option("instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
  auto* fn = app.add_subcommand("functionals", "Print the chaining functionals")->fallthrough();
  fn->add_option("instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const double tol = g.tol.value_or(mmt::kDefaultCouplingTol);
    if (gen->parsed()) {
      const auto fam = mmt::parse_family(family);
      emit(mmt::instance_to_json(mmt::generate_instance(*fam, size, dim, g.seed.value_or(0), distance)), g);
      return 0;
    }
    const mmt::Instance inst = load(instance_path, g);
    if (audit->parsed()) {
      mmt::AuditBudget budget;
      if (g.samples) budget.samples = *g.samples;
      budget.grid_points = grid_points;
      budget.rd_tol = tol;
      const mmt::AuditReport report = mmt::run_audit(inst, parse_checks(g.checks), budget);
      const auto path = mmt::write_report(report, g.out.empty() ? "reports" : g.out);
      for (const auto& c : report.checks)
        std::cerr << c.check_id << ' ' << mmt::to_string(c.status) << (c.error.empty() ? "" : "  " + c.error) << '\n';
      std::cout << path.string() << '\n';
      return report.any_failed() ? 2 : 0;
    }
    if (curves->parsed()) {
      if (g.out.empty()) throw mmt::Error(mmt::ErrorCode::BadParams, "curves needs --out");
      const auto files = mmt::export_curves(inst, grid_points, g.samples.value_or(mmt::AuditBudget{}.samples),
                                            inst.seed, g.out, tol);
      std::cout << files.curves.string() << '\n' << files.rd.string() << '\n';
      return 0;
    }
    const mmt::EmbeddedProcess emb = inst.process();
    const mmt::FiniteMetric metric = mmt::metric_of(emb);
    if (rd->parsed()) {
      emit_table(mmt::rd_table(mmt::pareto_trace(metric, inst.prior_law(), mmt::default_lambda_grid(metric), tol)), g);
      return 0;
    }
    if (fn->parsed()) {
      const mmt::FtResult ft = mmt::ft_optimize(metric, {}, inst.seed);
      mmt::CsvTable t;
      t.header = {"ft_optimized", "ft_restart", "gamma2_cap1", "gamma2_cap2"};
      const bool small = emb.size() <= mmt::kGamma2MaxPoints;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      t.rows.push_back({ft.value, static_cast<double>(ft.restart), small ? mmt::gamma2_part_exact(metric, 1) : nan,
                        small ? mmt::gamma2_part_exact(metric, 2) : nan});
      emit_table(t, g);
      return 0;
    }
  } catch (const mmt::Error& e) {
    std::cerr << "mmt-lab: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
