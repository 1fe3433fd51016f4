#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace absense {

using Position = std::array<double, 3>;

/// One nano-node below the centre of every unit cell, at uniform depth.
/// node_index = row * cols + col.
class Topology {
public:
  Topology(std::size_t rows, std::size_t cols, double pitch_m, double depth_m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double pitch_m() const { return pitch_m_; }
  double depth_m() const { return depth_m_; }
  std::size_t node_count() const { return positions_.size(); }
  const std::vector<Position>& positions() const { return positions_; }

  std::size_t row_of(std::size_t node) const { return node / cols_; }
  std::size_t col_of(std::size_t node) const { return node % cols_; }

  double distance_m(std::size_t a, std::size_t b) const;

  /// Nodes (excluding `node`) within `radius_m`, ascending index order.
  std::vector<std::size_t> neighbors_within(std::size_t node, double radius_m) const;

  /// True if the node is at least `margin` cells away from every edge.
  bool is_interior(std::size_t node, std::size_t margin) const;

private:
  std::size_t rows_;
  std::size_t cols_;
  double pitch_m_;
  double depth_m_;
  std::vector<Position> positions_;
};

Topology build_topology(std::size_t rows = 30, std::size_t cols = 30, double pitch_m = 0.010,
                        double depth_m = 0.00025);

}  // namespace absense
