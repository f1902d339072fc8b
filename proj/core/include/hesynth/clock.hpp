#pragma once

#include <chrono>

namespace hesynth {

// Injectable time source so timeout behavior stays testable.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now_seconds() const = 0;
};

class SteadyClock final : public Clock {
 public:
  SteadyClock() : start_(std::chrono::steady_clock::now()) {}
  double now_seconds() const override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Time stands still unless advanced by hand; used in tests.
class ManualClock final : public Clock {
 public:
  double now_seconds() const override { return now_; }
  void advance(double seconds) { now_ += seconds; }

 private:
  double now_ = 0.0;
};

inline const Clock& default_clock() {
  static SteadyClock clock;
  return clock;
}

}  // namespace hesynth
