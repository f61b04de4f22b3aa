#include "mmt/instance.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mmt/error.hpp"

namespace mmt {
namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, const char* field) {
  if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::BadParams, std::string(field) + " must be a nonempty array");
  const std::size_t r = rows.size();
  const std::size_t c = rows[0].is_array() ? rows[0].size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < r; ++i) {
    if (!rows[i].is_array() || rows[i].size() != c) throw Error(ErrorCode::BadParams, std::string(field) + " is ragged");
    for (std::size_t j = 0; j < c; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
  }
  return m;
}

std::string default_name(Family family, std::size_t size, std::size_t dim, Seed seed) {
  std::ostringstream os;
  os << to_string(family) << "-n" << size << "-d" << dim << "-s" << seed;
  return os.str();
}

}  // namespace

std::size_t Instance::size() const {
  if (points) return static_cast<std::size_t>(points->rows());
  if (covariance) return static_cast<std::size_t>(covariance->rows());
  return 0;
}

void Instance::validate() const {
  if (points.has_value() == covariance.has_value())
    throw Error(ErrorCode::BadParams, "instance needs exactly one of points and covariance");
  const std::size_t n = size();
  if (n == 0) throw Error(ErrorCode::BadParams, "instance has no points");
  if (points && static_cast<std::size_t>(points->cols()) != dim)
    throw Error(ErrorCode::BadParams, "points do not have dim columns");
  if (covariance && covariance->cols() != covariance->rows())
    throw Error(ErrorCode::BadParams, "covariance must be square");
  if (prior.size() != n) throw Error(ErrorCode::BadParams, "prior length does not match the instance size");
}

EmbeddedProcess Instance::process() const {
  validate();
  if (points) return EmbeddedProcess::from_points(*points);
  return embed(validate_covariance(*covariance));
}

Prior Instance::prior_law() const {
  validate();
  return Prior::from_weights(prior);
}

std::optional<Family> parse_family(std::string_view name) {
  if (name == "two_point") return Family::TwoPoint;
  if (name == "orthonormal") return Family::Orthonormal;
  if (name == "simplex") return Family::Simplex;
  if (name == "cloud") return Family::Cloud;
  if (name == "ultrametric") return Family::Ultrametric;
  return std::nullopt;
}

std::string_view to_string(Family family) {
  switch (family) {
    case Family::TwoPoint: return "two_point";
    case Family::Orthonormal: return "orthonormal";
    case Family::Simplex: return "simplex";
    case Family::Cloud: return "cloud";
    case Family::Ultrametric: return "ultrametric";
  }
  return "unknown";
}

Instance generate_instance(Family family, std::size_t size, std::size_t dim, Seed seed, double distance) {
  if (size == 0) throw Error(ErrorCode::BadParams, "size must be >= 1");
  if (family != Family::Ultrametric && dim == 0) throw Error(ErrorCode::BadParams, "dim must be >= 1");
  const Eigen::Index n = static_cast<Eigen::Index>(size);
  const Eigen::Index d = static_cast<Eigen::Index>(dim);

  Instance inst;
  inst.seed = seed;
  inst.dim = dim;
  inst.prior.assign(size, 1.0 / static_cast<double>(size));

  switch (family) {
    case Family::TwoPoint: {
      if (size != 2) throw Error(ErrorCode::BadParams, "two_point needs size 2");
      if (!(distance > 0.0) || !std::isfinite(distance)) throw Error(ErrorCode::BadParams, "distance must be > 0");
      Eigen::MatrixXd p = Eigen::MatrixXd::Zero(2, d);
      p(0, 0) = 0.5 * distance;
      p(1, 0) = -0.5 * distance;
      inst.points = p;
      break;
    }
    case Family::Orthonormal:
    case Family::Simplex: {
      if (dim < size) throw Error(ErrorCode::BadParams, "dim must be >= size");
      const double scale = family == Family::Simplex ? std::sqrt(0.5) : 1.0;
      Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, d);
      for (Eigen::Index i = 0; i < n; ++i) p(i, i) = scale;
      inst.points = p;
      break;
    }
    case Family::Cloud: {
      Eigen::MatrixXd p(n, d);
      for (Eigen::Index i = 0; i < n; ++i) {
        CounterRng rng(derive_seed(seed, "cloud"), static_cast<std::uint64_t>(i));
        Eigen::VectorXd g(d);
        rng.fill_normal({g.data(), dim});
        const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
        p.row(i) = (radius / g.norm()) * g.transpose();
      }
      inst.points = p;
      break;
    }
    case Family::Ultrametric: {
      // depth[a][b] = depth of the common ancestor of leaves a and b.
      Eigen::MatrixXd k = Eigen::MatrixXd::Constant(n, n, 0.5);
      CounterRng rng(derive_seed(seed, "ultrametric"), 0);
      std::function<void(Eigen::Index, Eigen::Index, int)> split = [&](Eigen::Index lo, Eigen::Index hi, int depth) {
        const Eigen::Index count = hi - lo;
        if (count < 2) return;
        const Eigen::Index cut =
            lo + 1 + static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(count - 1));
        const double v = 0.5 - 0.5 * std::pow(4.0, -depth);
        for (Eigen::Index a = lo; a < cut; ++a)
          for (Eigen::Index b = cut; b < hi; ++b) k(a, b) = k(b, a) = v;
        split(lo, cut, depth + 1);
        split(cut, hi, depth + 1);
      };
      split(0, n, 0);
      inst.covariance = k;
      inst.dim = size;
      break;
    }
  }
  inst.name = default_name(family, size, inst.dim, seed);
  return inst;
}

std::string instance_to_json(const Instance& inst) {
  inst.validate();
  json j;
  j["name"] = inst.name;
  j["dim"] = inst.dim;
  if (inst.points) j["points"] = matrix_to_json(*inst.points);
  if (inst.covariance) j["covariance"] = matrix_to_json(*inst.covariance);
  j["prior"] = inst.prior;
  j["seed"] = inst.seed;
  return j.dump(2) + "\n";
}

Instance instance_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadParams, std::string("instance is not valid JSON: ") + e.what());
  }
  Instance inst;
  try {
    inst.name = j.at("name").get<std::string>();
    inst.dim = j.at("dim").get<std::size_t>();
    if (j.contains("points")) inst.points = matrix_from_json(j["points"], "points");
    if (j.contains("covariance")) inst.covariance = matrix_from_json(j["covariance"], "covariance");
    inst.prior = j.at("prior").get<std::vector<double>>();
    inst.seed = j.at("seed").get<Seed>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadParams, std::string("malformed instance: ") + e.what());
  }
  inst.validate();
  return inst;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

void save_instance(const Instance& inst, const std::filesystem::path& path) { write_text(path, instance_to_json(inst)); }

Instance load_instance(const std::filesystem::path& path) { return instance_from_json(read_text(path)); }

}  // namespace mmt
