#include "absense/topology.hpp"

#include <cmath>
#include <stdexcept>

namespace absense {

Topology::Topology(std::size_t rows, std::size_t cols, double pitch_m, double depth_m)
    : rows_(rows), cols_(cols), pitch_m_(pitch_m), depth_m_(depth_m) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("topology needs rows, cols >= 1");
  if (!(pitch_m > 0.0)) throw std::invalid_argument("topology pitch must be positive");
  if (!(depth_m >= 0.0)) throw std::invalid_argument("topology depth must be non-negative");
  positions_.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      positions_.push_back({(static_cast<double>(c) + 0.5) * pitch_m,
                            (static_cast<double>(r) + 0.5) * pitch_m, -depth_m});
}

double Topology::distance_m(std::size_t a, std::size_t b) const {
  const auto& p = positions_.at(a);
  const auto& q = positions_.at(b);
  const double dx = p[0] - q[0];
  const double dy = p[1] - q[1];
  const double dz = p[2] - q[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<std::size_t> Topology::neighbors_within(std::size_t node, double radius_m) const {
  if (!(radius_m > 0.0)) throw std::invalid_argument("neighbor radius must be positive");
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < positions_.size(); ++j)
    if (j != node && distance_m(node, j) <= radius_m) out.push_back(j);
  return out;
}

bool Topology::is_interior(std::size_t node, std::size_t margin) const {
  const std::size_t r = row_of(node);
  const std::size_t c = col_of(node);
  return r >= margin && c >= margin && r + margin < rows_ && c + margin < cols_;
}

Topology build_topology(std::size_t rows, std::size_t cols, double pitch_m, double depth_m) {
  return Topology(rows, cols, pitch_m, depth_m);
}

}  // namespace absense
