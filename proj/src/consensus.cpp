#include "absense/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace absense {

ConsensusState::ConsensusState(Estimate initial, double self_weight)
    : estimate_(initial), self_weight_(self_weight) {
  if (!(self_weight > 0.0 && self_weight < 1.0))
    throw std::invalid_argument("self_weight must lie in (0, 1), got " + std::to_string(self_weight));
}

void ConsensusState::record(std::uint8_t sender_id, const Estimate& estimate, double rx_power_w) {
  if (!(rx_power_w > 0.0) || !std::isfinite(rx_power_w))
    throw std::invalid_argument("reception power must be positive and finite");
  LogEntry& e = log_[sender_id];
  e.estimate = estimate;
  e.power_sum_w += rx_power_w;
  ++e.count;
}

double Weights::total() const {
  double t = self;
  for (const auto& [id, w] : senders) t += w;
  return t;
}

Weights compute_weights(const ConsensusState& state) {
  Weights w;
  if (state.log().empty()) return w;
  double sum = 0.0;
  for (const auto& [id, e] : state.log()) sum += e.mean_power_w();
  w.self = state.self_weight();
  const double share = 1.0 - w.self;
  for (const auto& [id, e] : state.log()) w.senders[id] = share * e.mean_power_w() / sum;
  return w;
}

Estimate consensus_update(const ConsensusState& state) {
  const Weights w = compute_weights(state);
  Estimate out{w.self * state.estimate().r_ohm, w.self * state.estimate().x_ohm};
  for (const auto& [id, e] : state.log()) {
    const double ws = w.senders.at(id);
    out.r_ohm += ws * e.estimate.r_ohm;
    out.x_ohm += ws * e.estimate.x_ohm;
  }
  return out;
}

WeightMatrix WeightMatrix::identity(std::size_t n) {
  WeightMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void WeightMatrix::check_row_stochastic(double tolerance) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = (*this)(i, j);
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("weight matrix entry (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") is negative or non-finite");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance)
      throw std::invalid_argument("weight matrix row " + std::to_string(i) + " sums to " +
                                  std::to_string(sum) + ", not 1");
  }
}

std::vector<Estimate> run_cycles(const std::vector<Estimate>& initials, const WeightMatrix& w,
                                 int cycles) {
  if (w.size() != initials.size())
    throw std::invalid_argument("weight matrix size does not match the number of estimates");
  if (cycles < 0) throw std::invalid_argument("cycle count must be non-negative");
  w.check_row_stochastic();
  std::vector<Estimate> x = initials;
  std::vector<Estimate> next(x.size());
  for (int c = 0; c < cycles; ++c) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      Estimate acc;
      for (std::size_t j = 0; j < x.size(); ++j) {
        acc.r_ohm += w(i, j) * x[j].r_ohm;
        acc.x_ohm += w(i, j) * x[j].x_ohm;
      }
      next[i] = acc;
    }
    x.swap(next);
  }
  return x;
}

Spread spread(const std::vector<Estimate>& estimates) {
  if (estimates.empty()) return {};
  auto [rmin, rmax] = std::minmax_element(estimates.begin(), estimates.end(),
                                          [](auto& a, auto& b) { return a.r_ohm < b.r_ohm; });
  auto [xmin, xmax] = std::minmax_element(estimates.begin(), estimates.end(),
                                          [](auto& a, auto& b) { return a.x_ohm < b.x_ohm; });
  return {rmax->r_ohm - rmin->r_ohm, xmax->x_ohm - xmin->x_ohm};
}

Spread variance(const std::vector<Estimate>& estimates) {
  if (estimates.empty()) return {};
  const double n = static_cast<double>(estimates.size());
  double mr = 0.0, mx = 0.0;
  for (const auto& e : estimates) {
    mr += e.r_ohm;
    mx += e.x_ohm;
  }
  mr /= n;
  mx /= n;
  Spread v;
  for (const auto& e : estimates) {
    v.r_ohm += (e.r_ohm - mr) * (e.r_ohm - mr);
    v.x_ohm += (e.x_ohm - mx) * (e.x_ohm - mx);
  }
  v.r_ohm /= n;
  v.x_ohm /= n;
  return v;
}

}  // namespace absense
