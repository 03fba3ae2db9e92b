#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace texterial {

/// Session time in milliseconds since the session started.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() const = 0;
};

class WallClock : public Clock {
 public:
  explicit WallClock(std::int64_t offset_ms = 0)
      : start_(std::chrono::steady_clock::now()), offset_ms_(offset_ms) {}

  std::int64_t now_ms() const override {
    return offset_ms_ + std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_)
                            .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
  std::int64_t offset_ms_;
};

/// Advanced explicitly by tests, replay, and the clock endpoint.
class ScriptedClock : public Clock {
 public:
  explicit ScriptedClock(std::int64_t start_ms = 0) : now_(start_ms) {}

  std::int64_t now_ms() const override { return now_.load(); }
  void set(std::int64_t ms) { now_.store(ms); }
  void advance(std::int64_t ms) { now_.fetch_add(ms); }

 private:
  std::atomic<std::int64_t> now_;
};

}  // namespace texterial
