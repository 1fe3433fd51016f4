#include "absense/simcore.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace absense {

SimTime SimTime::from_seconds(double seconds) {
  if (!std::isfinite(seconds)) throw std::invalid_argument("non-finite time value");
  return SimTime(std::llround(seconds * static_cast<double>(kTicksPerSecond)));
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::PulseAnnounce: return "PulseAnnounce";
    case EventKind::MeasurementDue: return "MeasurementDue";
    case EventKind::PacketAirStart: return "PacketAirStart";
    case EventKind::PacketAirEnd: return "PacketAirEnd";
    case EventKind::WindowClose: return "WindowClose";
  }
  return "?";
}

void EventQueue::schedule(SimTime time, EventKind kind, EventPayload payload) {
  if (time < now_) {
    throw std::logic_error("event scheduled in the past: t=" + std::to_string(time.ticks()) +
                           " fs < now=" + std::to_string(now_.ticks()) + " fs");
  }
  queue_.push(Event{time, next_sequence_++, kind, std::move(payload)});
}

SimTime EventQueue::run_until_quiescent(const Handler& handler) {
  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    ++dispatched_;
    handler(ev);
  }
  return now_;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t node, StreamPurpose purpose) {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ node);
  k = splitmix64(k ^ static_cast<std::uint64_t>(purpose));
  key_ = k;
}

std::uint64_t RngStream::next_u64() {
  return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

}  // namespace absense
