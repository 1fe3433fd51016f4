#pragma once

// Weighted-averaging consensus: self weight plus power-proportional weights
// for the estimates heard during one collection window.

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

namespace absense {

struct Estimate {
  double r_ohm = 0.0;
  double x_ohm = 0.0;
  bool operator==(const Estimate&) const = default;
};

struct LogEntry {
  Estimate estimate;
  double power_sum_w = 0.0;
  std::size_t count = 0;

  double mean_power_w() const { return power_sum_w / static_cast<double>(count); }
};

class ConsensusState {
public:
  explicit ConsensusState(Estimate initial = {}, double self_weight = 0.5);

  const Estimate& estimate() const { return estimate_; }
  void set_estimate(const Estimate& e) { estimate_ = e; }
  double self_weight() const { return self_weight_; }
  const std::map<std::uint8_t, LogEntry>& log() const { return log_; }

  /// Repeated senders within a window: last estimate wins, powers are averaged.
  /// Throws std::invalid_argument for non-positive or non-finite power.
  void record(std::uint8_t sender_id, const Estimate& estimate, double rx_power_w);
  void clear() { log_.clear(); }

private:
  Estimate estimate_;
  double self_weight_;
  std::map<std::uint8_t, LogEntry> log_;
};

struct Weights {
  double self = 1.0;
  std::map<std::uint8_t, double> senders;

  double total() const;
};

/// w_s = (1 - w_e) p_s / sum(p); an empty log leaves all weight on self.
Weights compute_weights(const ConsensusState& state);

/// w_e * own + sum(w_s * M_s), componentwise on (R, X).
Estimate consensus_update(const ConsensusState& state);

/// Dense row-stochastic matrix, row i holding node i's weights.
class WeightMatrix {
public:
  explicit WeightMatrix(std::size_t n) : n_(n), w_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return w_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }

  static WeightMatrix identity(std::size_t n);

  /// Throws std::invalid_argument if a row sum deviates from 1 by more than
  /// `tolerance` or an entry is negative.
  void check_row_stochastic(double tolerance = 1e-12) const;

private:
  std::size_t n_;
  std::vector<double> w_;
};

/// `cycles` synchronous rounds x <- W x applied to both components.
std::vector<Estimate> run_cycles(const std::vector<Estimate>& initials, const WeightMatrix& w,
                                 int cycles);

struct Spread {
  double r_ohm = 0.0;
  double x_ohm = 0.0;
};

/// max - min per component; zero for an empty set.
Spread spread(const std::vector<Estimate>& estimates);

/// Population variance per component.
Spread variance(const std::vector<Estimate>& estimates);

}  // namespace absense
