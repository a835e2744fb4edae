#ifndef MANISTOCH_BROWNIAN_HPP
#define MANISTOCH_BROWNIAN_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "manistoch/errors.hpp"
#include "manistoch/random.hpp"

namespace manistoch {

/// m-channel Brownian increments on a uniform grid of [0, T].
///
/// Generation is counter based. Write n_steps = q 2^k with q odd: the q root
/// increments are drawn directly and then split k times by the Brownian
/// bridge, first half = a/2 + sqrt(h)/2 Z, second half = a - first half.
/// Grids n and 2n therefore share every coarse increment. Increments are
/// rounded to multiples of 2^-48, which makes all refinement and
/// coarsening sums exact in floating point.
class BrownianDriver {
 public:
  static constexpr double quantum = 0x1.0p-48;

  BrownianDriver() = default;

  BrownianDriver(int m, double horizon, int n_steps, std::uint64_t seed, std::uint64_t path_index)
      : m_(m), horizon_(horizon), dt_(horizon / n_steps), n_steps_(n_steps), seed_(seed), path_index_(path_index) {
    if (m < 0) throw UsageError("driver: channel count must be >= 0");
    if (n_steps < 1) throw UsageError("driver: n_steps must be >= 1");
    if (!(horizon > 0.0)) throw UsageError("driver: T must be positive");
    increments_.assign(static_cast<std::size_t>(n_steps) * static_cast<std::size_t>(m), 0.0);
    int q = n_steps;
    int k = 0;
    while (q % 2 == 0) {
      q /= 2;
      ++k;
    }
    std::vector<double> cur;
    std::vector<double> next;
    for (int ch = 0; ch < m; ++ch) {
      cur.assign(static_cast<std::size_t>(q), 0.0);
      double h = horizon / q;
      for (int i = 0; i < q; ++i) cur[static_cast<std::size_t>(i)] = quantize(std::sqrt(h) * variate(ch, 0, i));
      for (int level = 1; level <= k; ++level) {
        next.resize(cur.size() * 2);
        for (std::size_t i = 0; i < cur.size(); ++i) {
          const double a = cur[i];
          const double first = quantize(0.5 * a + 0.5 * std::sqrt(h) * variate(ch, level, static_cast<std::int64_t>(i)));
          next[2 * i] = first;
          next[2 * i + 1] = a - first;
        }
        cur.swap(next);
        h *= 0.5;
      }
      for (int s = 0; s < n_steps; ++s) at(s, ch) = cur[static_cast<std::size_t>(s)];
    }
  }

  int channels() const { return m_; }
  double horizon() const { return horizon_; }
  int n_steps() const { return n_steps_; }
  double dt() const { return dt_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t path_index() const { return path_index_; }

  /// dW over step k, one entry per channel.
  std::span<const double> increment(int k) const {
    return {increments_.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(m_),
            static_cast<std::size_t>(m_)};
  }
  double increment(int k, int channel) const { return increments_[index(k, channel)]; }

  /// W_T per channel.
  std::vector<double> endpoint() const {
    std::vector<double> w(static_cast<std::size_t>(m_), 0.0);
    for (int k = 0; k < n_steps_; ++k) {
      for (int ch = 0; ch < m_; ++ch) w[static_cast<std::size_t>(ch)] += increment(k, ch);
    }
    return w;
  }

  /// Same path on the coarser grid of `level` steps (level must divide n_steps).
  BrownianDriver coarsened(int level) const {
    if (level < 1 || n_steps_ % level != 0) throw UsageError("driver: level must divide n_steps");
    const int g = n_steps_ / level;
    BrownianDriver out = shell(level, horizon_, horizon_ / level);
    for (int j = 0; j < level; ++j) {
      for (int ch = 0; ch < m_; ++ch) {
        double s = 0.0;
        for (int i = 0; i < g; ++i) s += increment(j * g + i, ch);
        out.at(j, ch) = s;
      }
    }
    return out;
  }

  /// Increments of W^T_t = W_{T-t} - W_T: order reversed, signs flipped.
  BrownianDriver reversed() const {
    BrownianDriver out = shell(n_steps_, horizon_, dt_);
    for (int k = 0; k < n_steps_; ++k) {
      for (int ch = 0; ch < m_; ++ch) out.at(k, ch) = -increment(n_steps_ - 1 - k, ch);
    }
    return out;
  }

  /// Shifted path theta_s W = W_{s+.} - W_s for s = `steps` grid steps.
  BrownianDriver shifted(int steps) const {
    if (steps < 0 || steps >= n_steps_) throw UsageError("driver: shift outside the grid");
    BrownianDriver out = shell(n_steps_ - steps, horizon_ - steps * dt_, dt_);
    for (int k = 0; k < out.n_steps_; ++k) {
      for (int ch = 0; ch < m_; ++ch) out.at(k, ch) = increment(k + steps, ch);
    }
    return out;
  }

  /// First `steps` grid steps.
  BrownianDriver truncated(int steps) const {
    if (steps < 1 || steps > n_steps_) throw UsageError("driver: truncation outside the grid");
    BrownianDriver out = shell(steps, steps * dt_, dt_);
    for (int k = 0; k < steps; ++k) {
      for (int ch = 0; ch < m_; ++ch) out.at(k, ch) = increment(k, ch);
    }
    return out;
  }

 private:
  static double quantize(double x) { return std::nearbyint(x / quantum) * quantum; }

  double variate(int channel, int level, std::int64_t i) const {
    return normal_pair(hash_words(seed_, path_index_, static_cast<std::uint64_t>(channel),
                                  static_cast<std::uint64_t>(level), static_cast<std::uint64_t>(i)))
        .first;
  }

  BrownianDriver shell(int n_steps, double horizon, double dt) const {
    BrownianDriver out;
    out.m_ = m_;
    out.horizon_ = horizon;
    out.dt_ = dt;
    out.n_steps_ = n_steps;
    out.seed_ = seed_;
    out.path_index_ = path_index_;
    out.increments_.assign(static_cast<std::size_t>(n_steps) * static_cast<std::size_t>(m_), 0.0);
    return out;
  }

  std::size_t index(int k, int ch) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(ch);
  }
  double& at(int k, int ch) { return increments_[index(k, ch)]; }

  int m_ = 0;
  double horizon_ = 1.0;
  double dt_ = 1.0;
  int n_steps_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t path_index_ = 0;
  std::vector<double> increments_;
};

inline BrownianDriver make_driver(int m, double horizon, int n_steps, std::uint64_t seed, std::uint64_t path_index) {
  return BrownianDriver(m, horizon, n_steps, seed, path_index);
}

}  // namespace manistoch

#endif  // MANISTOCH_BROWNIAN_HPP
