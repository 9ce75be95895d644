#pragma once

#include "mvsys/core.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mvsys {

enum class ScheduleMode { Constant, PiecewiseConstant, LinearInterp, Periodic };

namespace detail {
inline void check_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("Schedule: samples must share one shape");
  }
}
inline void check_same_shape(double, double) {}
inline Matrix lerp(const Matrix& a, const Matrix& b, double w) { return a + w * (b - a); }
inline double lerp(double a, double b, double w) { return a + w * (b - a); }
}  // namespace detail

// Time-indexed coefficient table. Evaluation beyond the last sample holds the
// last value; evaluation before the first sample is an error. Discrete-time
// schedules use the step index as the time axis.
template <class T>
class Schedule {
 public:
  Schedule() = default;

  static Schedule constant(T value) {
    Schedule s;
    s.mode_ = ScheduleMode::Constant;
    s.times_ = {0.0};
    s.values_ = {std::move(value)};
    return s;
  }

  static Schedule piecewise(std::vector<double> times, std::vector<T> values) {
    return make(ScheduleMode::PiecewiseConstant, std::move(times), std::move(values), 0.0);
  }

  static Schedule linear(std::vector<double> times, std::vector<T> values) {
    return make(ScheduleMode::LinearInterp, std::move(times), std::move(values), 0.0);
  }

  // Linear interpolation on one period, wrapping from the last sample back to
  // the first. period must cover the sample span.
  static Schedule periodic(std::vector<double> times, std::vector<T> values, double period) {
    if (!(period > 0)) throw std::invalid_argument("Schedule: period must be > 0");
    Schedule s = make(ScheduleMode::Periodic, std::move(times), std::move(values), period);
    if (s.times_.back() - s.times_.front() > period) {
      throw std::invalid_argument("Schedule: samples span more than one period");
    }
    return s;
  }

  T operator()(double t) const {
    if (values_.empty()) throw std::logic_error("Schedule: empty");
    if (mode_ == ScheduleMode::Constant) return values_[0];

    double tau = t;
    if (mode_ == ScheduleMode::Periodic) {
      tau = times_.front() + std::fmod(t - times_.front(), period_);
      if (tau < times_.front()) tau += period_;  // negative fmod
    }
    const double slack = 1e-12 * std::max(1.0, std::fabs(times_.front()));
    if (tau < times_.front() - slack) {
      throw std::out_of_range("Schedule: evaluation before first sample");
    }
    if (tau <= times_.front()) return values_.front();

    if (mode_ == ScheduleMode::Periodic && tau > times_.back()) {
      // wrap segment: last sample -> first value at front + period
      const double span = times_.front() + period_ - times_.back();
      if (span <= 0) return values_.front();
      const double w = (tau - times_.back()) / span;
      return detail::lerp(values_.back(), values_.front(), w);
    }
    if (tau >= times_.back()) return values_.back();

    // first segment with times_[k] <= tau < times_[k+1]
    size_t lo = 0, hi = times_.size() - 1;
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      if (times_[mid] <= tau) lo = mid; else hi = mid;
    }
    if (mode_ == ScheduleMode::PiecewiseConstant) return values_[lo];
    const double w = (tau - times_[lo]) / (times_[lo + 1] - times_[lo]);
    return detail::lerp(values_[lo], values_[lo + 1], w);
  }

  bool is_constant() const { return mode_ == ScheduleMode::Constant; }
  ScheduleMode mode() const { return mode_; }
  double start() const { return times_.front(); }
  double period() const { return period_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<T>& values() const { return values_; }

 private:
  static Schedule make(ScheduleMode mode, std::vector<double> times, std::vector<T> values,
                       double period) {
    if (times.empty() || times.size() != values.size()) {
      throw std::invalid_argument("Schedule: times/values size mismatch");
    }
    for (size_t i = 1; i < times.size(); ++i) {
      if (!(times[i] > times[i - 1])) {
        throw std::invalid_argument("Schedule: times must be strictly increasing");
      }
      detail::check_same_shape(values[i], values[0]);
    }
    Schedule s;
    s.mode_ = mode;
    s.times_ = std::move(times);
    s.values_ = std::move(values);
    s.period_ = period;
    return s;
  }

  ScheduleMode mode_ = ScheduleMode::Constant;
  std::vector<double> times_;
  std::vector<T> values_;
  double period_ = 0.0;
};

using MatrixSchedule = Schedule<Matrix>;
using ScalarSchedule = Schedule<double>;

}  // namespace mvsys
