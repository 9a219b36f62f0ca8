#include "lagstab/quadrature.hpp"

#include "lagstab/error.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace lagstab {

AxisRule gauss_legendre(int points) {
  if (points < 1 || points > 64)
    throw Error(ErrorCode::invalid_argument, "Gauss-Legendre order must lie in [1, 64]");
  // legendre_p_zeros returns the non-negative roots in ascending order
  const std::vector<double> half = boost::math::legendre_p_zeros<double>(points);
  AxisRule rule;
  auto weight = [points](double x) {
    const double dp = boost::math::legendre_p_prime<double>(points, x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  for (auto it = half.rbegin(); it != half.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
    rule.weights.push_back(weight(*it));
  }
  for (double x : half) {
    rule.nodes.push_back(x);
    rule.weights.push_back(weight(x));
  }
  return rule;
}

AxisRule composite_gauss_legendre(Interval interval, int cells, int points) {
  if (cells < 1) throw Error(ErrorCode::invalid_argument, "need at least one cell");
  const AxisRule ref = gauss_legendre(points);
  const double h = interval.width() / cells;
  AxisRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(cells * points));
  rule.weights.reserve(static_cast<std::size_t>(cells * points));
  for (int c = 0; c < cells; ++c) {
    const double lo = interval.lo + c * h;
    for (std::size_t p = 0; p < ref.nodes.size(); ++p) {
      rule.nodes.push_back(lo + 0.5 * h * (ref.nodes[p] + 1.0));
      rule.weights.push_back(0.5 * h * ref.weights[p]);
    }
  }
  return rule;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

QuadratureGrid::QuadratureGrid(const Box& box, int cells, int points_per_cell)
    : box_(box), cells_(cells), points_(points_per_cell) {
  const int d = box.dim;
  std::array<AxisRule, kMaxDim> axes;
  for (int i = 0; i < d; ++i)
    axes[i] = composite_gauss_legendre(box.axes[i], cells, points_per_cell);

  std::size_t cell_count = 1, point_count = 1;
  for (int i = 0; i < d; ++i) {
    cell_count *= static_cast<std::size_t>(cells);
    point_count *= static_cast<std::size_t>(points_per_cell);
  }
  nodes_.reserve(cell_count * point_count);
  weights_.reserve(cell_count * point_count);

  const auto cells_u = static_cast<std::size_t>(cells);
  const auto points_u = static_cast<std::size_t>(points_per_cell);
  for (std::size_t cell = 0; cell < cell_count; ++cell) {
    std::array<std::size_t, kMaxDim> cidx{};
    std::size_t rest = cell;
    for (int i = d - 1; i >= 0; --i) {
      cidx[i] = rest % cells_u;
      rest /= cells_u;
    }
    for (std::size_t pt = 0; pt < point_count; ++pt) {
      Vec u{};
      double w = 1.0;
      std::size_t prest = pt;
      for (int i = d - 1; i >= 0; --i) {
        const std::size_t k = cidx[i] * points_u + prest % points_u;
        prest /= points_u;
        u[i] = axes[i].nodes[k];
        w *= axes[i].weights[k];
      }
      nodes_.push_back(u);
      weights_.push_back(w);
    }
  }
}

std::vector<double> NodeValues::channel(int c) const {
  std::vector<double> v(nodes_);
  for (std::size_t n = 0; n < nodes_; ++n)
    v[n] = data_[n * static_cast<std::size_t>(channels_) + static_cast<std::size_t>(c)];
  return v;
}

double NodeValues::sum(int c) const { return pairwise_sum(channel(c)); }

double NodeValues::max(int c) const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < nodes_; ++n)
    m = std::max(m, data_[n * static_cast<std::size_t>(channels_) + static_cast<std::size_t>(c)]);
  return m;
}

NodeValues evaluate_nodes(const QuadratureGrid& grid, int channels, int workers,
                          const NodeKernel& kernel) {
  NodeValues values(channels, grid.size());
  const std::size_t n = grid.size();
  const auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) kernel(grid.node(i), grid.weight(i), values.at(i));
  };
  if (workers <= 1 || n < 2) {
    run(0, n);
    return values;
  }

  const auto w = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> threads;
    threads.reserve(w);
    for (std::size_t t = 0; t < w; ++t) {
      const std::size_t begin = n * t / w;
      const std::size_t end = n * (t + 1) / w;
      threads.emplace_back([&, begin, end] {
        try {
          run(begin, end);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return values;
}

} // namespace lagstab
