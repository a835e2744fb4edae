#ifndef MANISTOCH_SOBOLEV_HPP
#define MANISTOCH_SOBOLEV_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "manistoch/field.hpp"
#include "manistoch/parallel.hpp"
#include "manistoch/sampling.hpp"
#include "manistoch/stats.hpp"

namespace manistoch {

/// Monte Carlo norms of a vector field, with standard errors.
struct SobolevNormReport {
  double p = 1.0;
  std::size_t samples = 0;
  std::size_t singular_skipped = 0;
  Estimate l_p_norm;       // ||X||_p
  Estimate grad_p_norm;    // ||nabla X||_p
  Estimate w1p_norm;       // ||X||_{1,p} = ||X||_p + ||nabla X||_p
  double sup_norm = 0.0;   // max |X|_x over the samples
  double div_neg_sup = 0.0;  // max [div X]^- over the samples
  // Heavy-tail diagnostics for int |nabla X|^p.
  double tail_share = 0.0;    // largest single term / sum
  double growth_ratio = 1.0;  // estimate on all samples / estimate on the first 1/16
  bool non_sobolev_flag = false;
};

namespace detail {

/// (nu(M) mean)^{1/p} with a delta-method standard error.
inline Estimate lp_from_powers(std::span<const double> powers, double volume, double p) {
  const Estimate m = mean_se(powers);
  const double integral = volume * m.value;
  if (integral <= 0.0) return {0.0, 0.0};
  const double norm = std::pow(integral, 1.0 / p);
  return {norm, norm / p * (m.se / m.value)};
}

}  // namespace detail

template <Manifold M>
SobolevNormReport sobolev_norms(const VectorField<M>& field, const std::vector<Point<M>>& points, double p,
                                int threads = 1) {
  if (!(p >= 1.0)) throw UsageError("sobolev_norms: p must be >= 1");
  const std::size_t n = points.size();
  std::vector<double> val_p(n, 0.0);
  std::vector<double> grad_p(n, 0.0);
  std::vector<double> absval(n, 0.0);
  std::vector<double> div_neg(n, 0.0);
  std::vector<char> singular(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    if (field.singular_at(points[i])) {
      singular[i] = 1;
      const double v = field.value(points[i]).norm();
      absval[i] = v;
      val_p[i] = std::pow(v, p);
      return;
    }
    const auto j = field.jet(points[i]);
    absval[i] = j.value.norm();
    val_p[i] = std::pow(absval[i], p);
    grad_p[i] = std::pow(j.nabla_norm(), p);
    div_neg[i] = std::max(0.0, -j.divergence());
  });

  SobolevNormReport rep;
  rep.p = p;
  rep.samples = n;
  std::vector<double> grad_kept;
  grad_kept.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.sup_norm = std::max(rep.sup_norm, absval[i]);
    if (singular[i]) {
      ++rep.singular_skipped;
      continue;
    }
    rep.div_neg_sup = std::max(rep.div_neg_sup, div_neg[i]);
    grad_kept.push_back(grad_p[i]);
  }
  rep.l_p_norm = detail::lp_from_powers(val_p, M::volume, p);
  if (!grad_kept.empty()) {
    rep.grad_p_norm = detail::lp_from_powers(grad_kept, M::volume, p);
    double total = 0.0;
    double largest = 0.0;
    for (double g : grad_kept) {
      total += g;
      largest = std::max(largest, g);
    }
    rep.tail_share = total > 0.0 ? largest / total : 0.0;
    const std::size_t head = grad_kept.size() / 16;
    if (head >= 2) {
      double head_mean = 0.0;
      for (std::size_t i = 0; i < head; ++i) head_mean += grad_kept[i];
      head_mean /= static_cast<double>(head);
      const double all_mean = total / static_cast<double>(grad_kept.size());
      rep.growth_ratio = head_mean > 0.0 ? all_mean / head_mean : 1.0;
    }
  }
  rep.w1p_norm = {rep.l_p_norm.value + rep.grad_p_norm.value,
                  std::hypot(rep.l_p_norm.se, rep.grad_p_norm.se)};
  rep.non_sobolev_flag = rep.tail_share > 0.05 || rep.growth_ratio > 1.5;
  return rep;
}

template <Manifold M>
SobolevNormReport sobolev_norms(const VectorField<M>& field, double p, std::size_t quadrature_n, std::uint64_t seed,
                                int threads = 1) {
  return sobolev_norms(field, sample_uniform<M>(quadrature_n, seed), p, threads);
}

/// Whether the rough family with exponent gamma lies in H^p_1.
inline bool rough_field_in_sobolev(double gamma, double p) { return p * (1.0 - gamma) < 1.0; }

}  // namespace manistoch

#endif  // MANISTOCH_SOBOLEV_HPP
