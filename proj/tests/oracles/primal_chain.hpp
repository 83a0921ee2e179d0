#pragma once

// Primal dynamic program for the bounded-Lipschitz chain LP. It tracks the
// concave value function V_i(p) = max{ sum_{l <= i} c_l phi_l : phi_i = p }
// directly, so it shares nothing with the dual solver in the library. Slow on
// adversarial inputs but exact.

#include <algorithm>
#include <deque>
#include <limits>
#include <vector>

namespace oracle {

class PrimalChainLp {
 public:
  double solve(const std::vector<double>& x, const std::vector<double>& c) {
    reset();
    if (x.empty()) return 0.0;
    add_linear(c[0]);
    for (std::size_t i = 1; i < x.size(); ++i) {
      dilate(x[i] - x[i - 1]);
      add_linear(c[i]);
    }
    return max_;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  struct Kink {
    double pos;    // stored relative to the side's offset
    double drop;   // slope decrease across the kink, > 0
  };

  void reset() {
    left_.clear();
    right_.clear();
    left_off_ = right_off_ = 0.0;
    arg_ = -1.0;
    max_ = 0.0;
    slope_left_ = kInf;  // no segment left of -1
    slope_right_ = 0.0;  // V_0 == 0 on [-1, 1]
  }

  void add_linear(double c) {
    max_ += c * arg_;
    slope_left_ += c;
    slope_right_ += c;
    while (slope_right_ > 0.0 && arg_ < 1.0) move_right();
    while (slope_left_ < 0.0 && arg_ > -1.0) move_left();
  }

  void move_right() {
    double next = 1.0;
    double drop = kInf;
    if (!right_.empty()) {
      next = right_.front().pos + right_off_;
      drop = right_.front().drop;
      right_.pop_front();
    }
    next = std::min(next, 1.0);
    max_ += slope_right_ * (next - arg_);
    if (slope_left_ != kInf && arg_ > -1.0) {
      const double kink = slope_left_ - slope_right_;
      if (kink > 0.0) left_.push_back({arg_ - left_off_, kink});
    }
    arg_ = next;
    slope_left_ = slope_right_;
    slope_right_ = drop == kInf ? -kInf : slope_right_ - drop;
  }

  void move_left() {
    double next = -1.0;
    double drop = kInf;
    if (!left_.empty()) {
      next = left_.back().pos + left_off_;
      drop = left_.back().drop;
      left_.pop_back();
    }
    next = std::max(next, -1.0);
    max_ += slope_left_ * (next - arg_);
    if (slope_right_ != -kInf && arg_ < 1.0) {
      const double kink = slope_left_ - slope_right_;
      if (kink > 0.0) right_.push_front({arg_ - right_off_, kink});
    }
    arg_ = next;
    slope_right_ = slope_left_;
    slope_left_ = drop == kInf ? kInf : slope_left_ + drop;
  }

  /// V <- max over |q - p| <= d of V(q), restricted to [-1, 1].
  void dilate(double d) {
    left_off_ -= d;
    right_off_ += d;
    // The kink at the maximizer splits into a flat top [arg - d, arg + d].
    const double top_right = arg_ + d;
    if (slope_right_ != -kInf && top_right < 1.0) {
      const double drop = -slope_right_;
      if (drop > 0.0) right_.push_front({top_right - right_off_, drop});
    }
    arg_ -= d;
    slope_right_ = 0.0;
    if (arg_ <= -1.0) {
      arg_ = -1.0;
      slope_left_ = kInf;
      left_.clear();
    }
    while (!left_.empty() && left_.front().pos + left_off_ <= -1.0) left_.pop_front();
    while (!right_.empty() && right_.back().pos + right_off_ >= 1.0) right_.pop_back();
  }

  std::deque<Kink> left_, right_;
  double left_off_ = 0.0, right_off_ = 0.0;
  double arg_ = -1.0;
  double max_ = 0.0;
  double slope_left_ = kInf, slope_right_ = 0.0;
};

}  // namespace oracle
