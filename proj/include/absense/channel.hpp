#pragma once

// Intra-substrate broadcast channel: log-distance path loss, SINR capture
// with guard-extended overlap, half-duplex radios, and the 72-bit consensus
// packet codec.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absense/simcore.hpp"
#include "absense/topology.hpp"

namespace absense {

/// Reference loss placing the interference-free reception edge at 2.5 cell
/// pitches (25 mm) with the default budget: 30 - 0 + 10 - 20 log10(25).
inline constexpr double kDefaultReferenceLossDb = 12.041199826559248;

struct ChannelConfig {
  double carrier_hz = 1e11;
  double noise_dbnw = 0.0;
  double sinr_threshold_db = -10.0;
  double guard_interval_s = 1e-10;
  double bitrate_bps = 1e11;
  int packet_bits = 100;
  double tx_power_dbnw = 30.0;
  double path_loss_exponent = 2.0;
  double reference_distance_m = 1e-3;
  double reference_loss_db = kDefaultReferenceLossDb;
  bool collisions_enabled = true;

  double packet_duration_s() const { return static_cast<double>(packet_bits) / bitrate_bps; }
  SimTime packet_duration() const { return SimTime::from_seconds(packet_duration_s()); }
  SimTime guard_interval() const { return SimTime::from_seconds(guard_interval_s); }
  void validate() const;
};

double dbnw_to_watts(double dbnw);
double watts_to_dbnw(double watts);

/// Reference loss such that the interference-free floor is met exactly at `range_m`.
double calibrated_reference_loss_db(const ChannelConfig& config, double range_m);

/// Distance at which P_rx - noise equals the SINR threshold.
double reception_radius_m(const ChannelConfig& config);

double received_power_dbnw(const ChannelConfig& config, double distance_m);
double received_power_dbnw(const ChannelConfig& config, const Topology& topology,
                           std::size_t sender, std::size_t receiver);

/// Pairwise received powers and reception-floor neighbourhoods, computed once
/// per (config, topology) and shared read-only between runs.
class LinkBudget {
public:
  LinkBudget(const ChannelConfig& config, const Topology& topology);

  std::size_t node_count() const { return n_; }
  double rx_watts(std::size_t sender, std::size_t receiver) const {
    return watts_[sender * n_ + receiver];
  }
  double rx_dbnw(std::size_t sender, std::size_t receiver) const {
    return dbnw_[sender * n_ + receiver];
  }
  /// Interference-free reception floor satisfied.
  bool in_range(std::size_t sender, std::size_t receiver) const {
    return in_range_[sender * n_ + receiver] != 0;
  }
  /// Receivers meeting the floor for `sender`, ascending.
  const std::vector<std::size_t>& audience(std::size_t sender) const { return audience_[sender]; }

private:
  std::size_t n_;
  std::vector<double> watts_;
  std::vector<double> dbnw_;
  std::vector<std::uint8_t> in_range_;
  std::vector<std::vector<std::size_t>> audience_;
};

inline constexpr int kPayloadBits = 72;
inline constexpr double kFixedPointScale = 1048576.0;  // 2^20 raw units per ohm

/// Ohms to the 32-bit wire representation (round half away from zero).
/// Throws std::out_of_range outside +-2048 ohm.
std::int32_t to_fixed(double ohms);
double from_fixed(std::int32_t raw);

struct ConsensusPacket {
  std::uint8_t sender_id = 0;
  std::int32_t r_value = 0;
  std::int32_t x_value = 0;

  static ConsensusPacket from_estimate(std::size_t node, double r_ohm, double x_ohm);
  double r_ohm() const { return from_fixed(r_value); }
  double x_ohm() const { return from_fixed(x_value); }
  bool operator==(const ConsensusPacket&) const = default;
};

/// Sender id on the wire: node index modulo 256.
std::uint8_t sender_id_for(std::size_t node);

/// Bits 0-7 sender_id, 8-39 r_value, 40-71 x_value, most significant bit first.
std::array<std::uint8_t, 9> encode_payload(const ConsensusPacket& packet);
ConsensusPacket decode_payload(std::span<const std::uint8_t, 9> bytes);

/// On-air frame: (packet_bits - 72) zero preamble bits followed by the payload.
std::vector<bool> encode_frame(const ConsensusPacket& packet, int packet_bits);
/// Throws std::invalid_argument on a wrong length or non-zero preamble.
ConsensusPacket decode_frame(const std::vector<bool>& frame, int packet_bits);

struct Transmission {
  std::size_t sender = 0;
  SimTime start;
  SimTime end;
  ConsensusPacket packet;
};

/// On-air intervals, each extended by the guard interval, overlap.
bool interferes(const Transmission& a, const Transmission& b, SimTime guard);

enum class Reception : std::uint8_t { Decoded, LostCollision, LostHalfDuplex, LostRange };

const char* to_string(Reception r);

struct ArbitrationOutcome {
  std::size_t transmission = 0;  // index into the arbitrated set
  Reception status = Reception::LostRange;
  double rx_power_w = 0.0;
  double sinr = 0.0;  // linear
};

/// Fate of `set[target]` at `receiver`, with every other member of `set`
/// that interferes with it counted as interference.
ArbitrationOutcome evaluate_reception(const ChannelConfig& config, const LinkBudget& budget,
                                      std::size_t receiver, std::span<const Transmission> set,
                                      std::size_t target);

/// Outcomes for every transmission in `set` not sent by `receiver`.
std::vector<ArbitrationOutcome> arbitrate_detailed(const ChannelConfig& config,
                                                   const LinkBudget& budget, std::size_t receiver,
                                                   std::span<const Transmission> set);

/// Decoded packets, ordered by (start time, sender).
std::vector<ConsensusPacket> arbitrate(const ChannelConfig& config, const LinkBudget& budget,
                                       std::size_t receiver, std::span<const Transmission> set);

}  // namespace absense
