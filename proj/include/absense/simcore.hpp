#pragma once

// Deterministic discrete-event engine: integer clock, totally ordered event
// queue and counter-based random streams.

#include <compare>
#include <cstdint>
#include <functional>
#include <queue>
#include <variant>
#include <vector>

namespace absense {

/// Simulated time as an integer count of femtoseconds. All protocol timings
/// (0.1 ns guard, 1 ns packets, 100 ns slots) are exact multiples.
class SimTime {
public:
  static constexpr std::int64_t kTicksPerSecond = 1'000'000'000'000'000;

  constexpr SimTime() = default;
  static constexpr SimTime from_ticks(std::int64_t ticks) { return SimTime(ticks); }
  static SimTime from_seconds(double seconds);

  constexpr std::int64_t ticks() const { return ticks_; }
  constexpr double seconds() const {
    return static_cast<double>(ticks_) / static_cast<double>(kTicksPerSecond);
  }

  constexpr SimTime operator+(SimTime o) const { return SimTime(ticks_ + o.ticks_); }
  constexpr SimTime operator-(SimTime o) const { return SimTime(ticks_ - o.ticks_); }
  constexpr SimTime operator*(std::int64_t n) const { return SimTime(ticks_ * n); }
  constexpr SimTime& operator+=(SimTime o) {
    ticks_ += o.ticks_;
    return *this;
  }
  constexpr auto operator<=>(const SimTime&) const = default;

private:
  constexpr explicit SimTime(std::int64_t ticks) : ticks_(ticks) {}
  std::int64_t ticks_ = 0;
};

enum class EventKind : std::uint8_t {
  PulseAnnounce,
  MeasurementDue,
  PacketAirStart,
  PacketAirEnd,
  WindowClose,
};

const char* to_string(EventKind kind);

struct PulsePayload {
  std::size_t load_id;
};
struct MeasurementPayload {
  std::size_t load_id;
};
struct PacketPayload {
  std::size_t node;
  std::size_t transmission;  // index into the cycle's transmission list
};
struct WindowPayload {
  int cycle;
};

using EventPayload =
    std::variant<std::monostate, PulsePayload, MeasurementPayload, PacketPayload, WindowPayload>;

struct Event {
  SimTime time;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::PulseAnnounce;
  EventPayload payload;
};

/// Single-threaded event loop. Events dispatch in (time, sequence) order;
/// scheduling into the past throws std::logic_error.
class EventQueue {
public:
  using Handler = std::function<void(const Event&)>;

  void schedule(SimTime time, EventKind kind, EventPayload payload = {});

  /// Dispatches until the queue is empty and returns the final clock value.
  SimTime run_until_quiescent(const Handler& handler);

  SimTime now() const { return now_; }
  std::size_t pending() const { return queue_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }

private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  SimTime now_;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t dispatched_ = 0;
};

enum class StreamPurpose : std::uint64_t {
  MeasurementNoise = 1,
  RandomDelay = 2,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based random stream keyed by (seed, node, purpose). Draws on one
/// stream never shift any other stream.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t node, StreamPurpose purpose);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform in [lo, hi].
  double uniform(double lo, double hi);

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace absense
