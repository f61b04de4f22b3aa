#pragma once

// Audit instances: a finite process given by points or a covariance, plus a
// prior and a master seed. Stored as JSON with sorted keys.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mmt/process.hpp"
#include "mmt/random.hpp"

namespace mmt {

struct Instance {
  std::string name;
  std::size_t dim = 0;
  /// Exactly one of points (size x dim) and covariance (size x size) is set.
  std::optional<Eigen::MatrixXd> points;
  std::optional<Eigen::MatrixXd> covariance;
  std::vector<double> prior;
  Seed seed = 0;

  std::size_t size() const;
  /// Throws BadParams when the fields are inconsistent.
  void validate() const;
  EmbeddedProcess process() const;
  Prior prior_law() const;
};

enum class Family { TwoPoint, Orthonormal, Simplex, Cloud, Ultrametric };

std::optional<Family> parse_family(std::string_view name);
std::string_view to_string(Family family);

/// two_point:   +-(distance / 2) e_1, size must be 2.
/// orthonormal: e_1 .. e_size, needs dim >= size.
/// simplex:     e_i / sqrt(2) (all distances 1), needs dim >= size.
/// cloud:       i.i.d. uniform points in the unit ball of R^dim.
/// ultrametric: covariance of a random binary tree; leaves whose common
///              ancestor sits at depth j are 2^-j apart. dim is set to size.
/// The prior is uniform.
Instance generate_instance(Family family, std::size_t size, std::size_t dim, Seed seed, double distance = 1.0);

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(std::string_view text);

void save_instance(const Instance& inst, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

/// Text I/O helpers shared by the report and curve writers; IoError on failure.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace mmt
