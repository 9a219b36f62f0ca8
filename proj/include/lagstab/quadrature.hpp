#ifndef LAGSTAB_QUADRATURE_HPP
#define LAGSTAB_QUADRATURE_HPP

#include "lagstab/chart.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lagstab {

struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
AxisRule gauss_legendre(int points);
// Composite rule: `cells` equal cells on [lo, hi], `points` nodes per cell.
AxisRule composite_gauss_legendre(Interval interval, int cells, int points);

// Pairwise (cascade) summation in index order; bit-stable for a given input.
double pairwise_sum(std::span<const double> values);

// Tensor-product composite Gauss-Legendre rule over a box. Nodes are
// enumerated cell-major: the outer loop runs over cells (last axis fastest),
// the inner loop over the points of one cell (last axis fastest).
class QuadratureGrid {
public:
  explicit QuadratureGrid(const Box& box, int cells = 40, int points_per_cell = 8);

  const Box& box() const { return box_; }
  int cells() const { return cells_; }
  int points_per_cell() const { return points_; }
  std::size_t size() const { return nodes_.size(); }

  const Vec& node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }

private:
  Box box_;
  int cells_ = 0;
  int points_ = 0;
  std::vector<Vec> nodes_;
  std::vector<double> weights_;
};

// Per-node integrand values for several channels. Evaluation may run on
// several workers; every reduction afterwards is sequential in node order,
// so results do not depend on the worker count.
class NodeValues {
public:
  NodeValues(int channels, std::size_t nodes)
      : channels_(channels), nodes_(nodes),
        data_(static_cast<std::size_t>(channels) * nodes, 0.0) {}

  std::span<double> at(std::size_t node) {
    return {data_.data() + node * static_cast<std::size_t>(channels_),
            static_cast<std::size_t>(channels_)};
  }
  std::vector<double> channel(int c) const;
  double sum(int c) const;
  double max(int c) const;

  int channels() const { return channels_; }
  std::size_t nodes() const { return nodes_; }

private:
  int channels_;
  std::size_t nodes_;
  std::vector<double> data_; // node-major
};

using NodeKernel = std::function<void(const Vec& u, double weight, std::span<double> out)>;

NodeValues evaluate_nodes(const QuadratureGrid& grid, int channels, int workers,
                          const NodeKernel& kernel);

} // namespace lagstab

#endif
