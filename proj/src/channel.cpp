#include "absense/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace absense {

void ChannelConfig::validate() const {
  if (!(carrier_hz > 0.0)) throw std::invalid_argument("channel.carrier_hz must be positive");
  if (!(guard_interval_s >= 0.0))
    throw std::invalid_argument("channel.guard_interval_s must be non-negative");
  if (!(bitrate_bps > 0.0)) throw std::invalid_argument("channel.bitrate_bps must be positive");
  if (packet_bits < kPayloadBits)
    throw std::invalid_argument("channel.packet_bits must be at least 72");
  if (!(path_loss_exponent > 0.0))
    throw std::invalid_argument("channel.path_loss_exponent must be positive");
  if (!(reference_distance_m > 0.0))
    throw std::invalid_argument("channel.reference_distance_m must be positive");
  for (double v : {noise_dbnw, sinr_threshold_db, tx_power_dbnw, reference_loss_db})
    if (!std::isfinite(v)) throw std::invalid_argument("channel decibel values must be finite");
}

double dbnw_to_watts(double dbnw) { return 1e-9 * std::pow(10.0, dbnw / 10.0); }

double watts_to_dbnw(double watts) { return 10.0 * std::log10(watts / 1e-9); }

double calibrated_reference_loss_db(const ChannelConfig& c, double range_m) {
  return c.tx_power_dbnw - c.noise_dbnw - c.sinr_threshold_db -
         10.0 * c.path_loss_exponent * std::log10(range_m / c.reference_distance_m);
}

double reception_radius_m(const ChannelConfig& c) {
  const double margin_db = c.tx_power_dbnw - c.reference_loss_db - c.noise_dbnw - c.sinr_threshold_db;
  return c.reference_distance_m * std::pow(10.0, margin_db / (10.0 * c.path_loss_exponent));
}

double received_power_dbnw(const ChannelConfig& c, double distance_m) {
  return c.tx_power_dbnw - c.reference_loss_db -
         10.0 * c.path_loss_exponent * std::log10(distance_m / c.reference_distance_m);
}

double received_power_dbnw(const ChannelConfig& config, const Topology& topology,
                           std::size_t sender, std::size_t receiver) {
  if (sender == receiver) throw std::invalid_argument("received_power_dbnw: sender == receiver");
  return received_power_dbnw(config, topology.distance_m(sender, receiver));
}

LinkBudget::LinkBudget(const ChannelConfig& config, const Topology& topology)
    : n_(topology.node_count()),
      watts_(n_ * n_, 0.0),
      dbnw_(n_ * n_, -std::numeric_limits<double>::infinity()),
      in_range_(n_ * n_, 0),
      audience_(n_) {
  config.validate();
  for (std::size_t s = 0; s < n_; ++s)
    for (std::size_t r = 0; r < n_; ++r) {
      if (s == r) continue;
      const double p = received_power_dbnw(config, topology, s, r);
      dbnw_[s * n_ + r] = p;
      watts_[s * n_ + r] = dbnw_to_watts(p);
      if (p - config.noise_dbnw >= config.sinr_threshold_db) {
        in_range_[s * n_ + r] = 1;
        audience_[s].push_back(r);
      }
    }
}

std::int32_t to_fixed(double ohms) {
  if (!std::isfinite(ohms)) throw std::out_of_range("fixed-point encode of non-finite value");
  const double scaled = std::round(ohms * kFixedPointScale);
  if (scaled < static_cast<double>(std::numeric_limits<std::int32_t>::min()) ||
      scaled > static_cast<double>(std::numeric_limits<std::int32_t>::max()))
    throw std::out_of_range("value " + std::to_string(ohms) + " ohm outside fixed-point range");
  return static_cast<std::int32_t>(scaled);
}

double from_fixed(std::int32_t raw) { return static_cast<double>(raw) / kFixedPointScale; }

std::uint8_t sender_id_for(std::size_t node) { return static_cast<std::uint8_t>(node % 256); }

ConsensusPacket ConsensusPacket::from_estimate(std::size_t node, double r_ohm, double x_ohm) {
  return ConsensusPacket{sender_id_for(node), to_fixed(r_ohm), to_fixed(x_ohm)};
}

std::array<std::uint8_t, 9> encode_payload(const ConsensusPacket& p) {
  const auto r = static_cast<std::uint32_t>(p.r_value);
  const auto x = static_cast<std::uint32_t>(p.x_value);
  return {p.sender_id,
          static_cast<std::uint8_t>(r >> 24), static_cast<std::uint8_t>(r >> 16),
          static_cast<std::uint8_t>(r >> 8),  static_cast<std::uint8_t>(r),
          static_cast<std::uint8_t>(x >> 24), static_cast<std::uint8_t>(x >> 16),
          static_cast<std::uint8_t>(x >> 8),  static_cast<std::uint8_t>(x)};
}

ConsensusPacket decode_payload(std::span<const std::uint8_t, 9> b) {
  auto word = [&](std::size_t i) {
    return static_cast<std::int32_t>((std::uint32_t{b[i]} << 24) | (std::uint32_t{b[i + 1]} << 16) |
                                     (std::uint32_t{b[i + 2]} << 8) | std::uint32_t{b[i + 3]});
  };
  return ConsensusPacket{b[0], word(1), word(5)};
}

std::vector<bool> encode_frame(const ConsensusPacket& packet, int packet_bits) {
  if (packet_bits < kPayloadBits) throw std::invalid_argument("packet_bits below payload size");
  std::vector<bool> frame(static_cast<std::size_t>(packet_bits - kPayloadBits), false);
  frame.reserve(static_cast<std::size_t>(packet_bits));
  for (std::uint8_t byte : encode_payload(packet))
    for (int bit = 7; bit >= 0; --bit) frame.push_back(((byte >> bit) & 1U) != 0);
  return frame;
}

ConsensusPacket decode_frame(const std::vector<bool>& frame, int packet_bits) {
  if (packet_bits < kPayloadBits || frame.size() != static_cast<std::size_t>(packet_bits))
    throw std::invalid_argument("frame length mismatch");
  const std::size_t preamble = frame.size() - kPayloadBits;
  for (std::size_t i = 0; i < preamble; ++i)
    if (frame[i]) throw std::invalid_argument("non-zero preamble bit");
  std::array<std::uint8_t, 9> bytes{};
  for (std::size_t i = 0; i < kPayloadBits; ++i)
    if (frame[preamble + i]) bytes[i / 8] |= static_cast<std::uint8_t>(1U << (7 - i % 8));
  return decode_payload(bytes);
}

bool interferes(const Transmission& a, const Transmission& b, SimTime guard) {
  return a.start < b.end + guard && b.start < a.end + guard;
}

const char* to_string(Reception r) {
  switch (r) {
    case Reception::Decoded: return "decoded";
    case Reception::LostCollision: return "lost_collision";
    case Reception::LostHalfDuplex: return "lost_half_duplex";
    case Reception::LostRange: return "lost_range";
  }
  return "?";
}

ArbitrationOutcome evaluate_reception(const ChannelConfig& config, const LinkBudget& budget,
                                      std::size_t receiver, std::span<const Transmission> set,
                                      std::size_t target) {
  const Transmission& t = set[target];
  ArbitrationOutcome out;
  out.transmission = target;
  if (t.sender == receiver) throw std::invalid_argument("evaluate_reception: own transmission");
  out.rx_power_w = budget.rx_watts(t.sender, receiver);
  const double noise_w = dbnw_to_watts(config.noise_dbnw);

  if (!budget.in_range(t.sender, receiver)) {
    out.status = Reception::LostRange;
    out.sinr = out.rx_power_w / noise_w;
    return out;
  }
  if (!config.collisions_enabled) {
    out.status = Reception::Decoded;
    out.sinr = out.rx_power_w / noise_w;
    return out;
  }

  const SimTime guard = config.guard_interval();
  double interference_w = 0.0;
  bool receiver_busy = false;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i == target) continue;
    const Transmission& u = set[i];
    if (!interferes(t, u, guard)) continue;
    if (u.sender == receiver) {
      receiver_busy = true;
      continue;
    }
    interference_w += budget.rx_watts(u.sender, receiver);
  }
  out.sinr = out.rx_power_w / (noise_w + interference_w);
  if (receiver_busy)
    out.status = Reception::LostHalfDuplex;
  else if (out.sinr >= std::pow(10.0, config.sinr_threshold_db / 10.0))
    out.status = Reception::Decoded;
  else
    out.status = Reception::LostCollision;
  return out;
}

std::vector<ArbitrationOutcome> arbitrate_detailed(const ChannelConfig& config,
                                                   const LinkBudget& budget, std::size_t receiver,
                                                   std::span<const Transmission> set) {
  // Evaluate in canonical (start, sender) order so the floating-point
  // interference sums do not depend on how the caller ordered the set.
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (set[a].start != set[b].start) return set[a].start < set[b].start;
    return set[a].sender < set[b].sender;
  });
  std::vector<Transmission> canonical;
  canonical.reserve(set.size());
  for (std::size_t i : order) canonical.push_back(set[i]);

  std::vector<ArbitrationOutcome> out;
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    if (canonical[i].sender == receiver) continue;
    auto o = evaluate_reception(config, budget, receiver, canonical, i);
    o.transmission = order[i];
    out.push_back(o);
  }
  return out;
}

std::vector<ConsensusPacket> arbitrate(const ChannelConfig& config, const LinkBudget& budget,
                                       std::size_t receiver, std::span<const Transmission> set) {
  std::vector<std::size_t> decoded;
  for (const auto& o : arbitrate_detailed(config, budget, receiver, set))
    if (o.status == Reception::Decoded) decoded.push_back(o.transmission);
  std::sort(decoded.begin(), decoded.end(), [&](std::size_t a, std::size_t b) {
    if (set[a].start != set[b].start) return set[a].start < set[b].start;
    return set[a].sender < set[b].sender;
  });
  std::vector<ConsensusPacket> out;
  for (std::size_t i : decoded) out.push_back(set[i].packet);
  return out;
}

}  // namespace absense
