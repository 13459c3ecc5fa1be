#include "ahsps/histogram.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ahsps {

std::uint64_t Histogram::total_binned() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Histogram build_histogram(std::span<const TriggerRecord> records, int n_max) {
  if (n_max < 0) {
    throw std::invalid_argument("n_max must be non-negative");
  }
  Histogram h;
  h.n_max = n_max;
  h.counts.assign(2 * static_cast<std::size_t>(n_max) + 1, 0);

  bool armed = false;
  bool start_is_a = false;
  std::size_t start_idx = 0;

  for (std::size_t k = 0; k < records.size(); ++k) {
    const TriggerRecord& r = records[k];
    if (armed) {
      const std::size_t sep = k - start_idx;
      if (sep <= static_cast<std::size_t>(n_max)) {
        const bool stop_click = start_is_a ? r.det_b != 0 : r.det_a != 0;
        if (stop_click) {
          const int n = start_is_a ? static_cast<int>(sep)
                                   : -static_cast<int>(sep);
          ++h.counts[static_cast<std::size_t>(n + n_max)];
          ++h.starts_consumed;
          armed = false;
          continue;  // a stop never arms a start at its own trigger
        }
        const bool same_click = start_is_a ? r.det_a != 0 : r.det_b != 0;
        if (same_click) ++h.invalid_starts;
        continue;
      }
      // Out of range: cancel, then treat this trigger as fresh input.
      ++h.cancelled_searches;
      ++h.starts_consumed;
      armed = false;
    }
    if (r.det_a && r.det_b) {
      ++h.counts[static_cast<std::size_t>(n_max)];
      ++h.starts_consumed;
    } else if (r.det_a) {
      armed = true;
      start_is_a = true;
      start_idx = k;
    } else if (r.det_b) {
      armed = true;
      start_is_a = false;
      start_idx = k;
    }
  }
  if (armed) {
    ++h.cancelled_searches;
    ++h.starts_consumed;
  }
  return h;
}

double theoretical_m(int n, double p_a, double p_b, double c) {
  if (n == 0) {
    throw std::invalid_argument(
        "theoretical bin content is defined off-center only");
  }
  if (n > 0) {
    return c * p_a * std::pow(1.0 - p_b, n) * p_b;
  }
  return c * p_b * std::pow(1.0 - p_a, -n) * p_a;
}

FitResult fit_c(const Histogram& h, double p_a, double p_b) {
  std::uint64_t non_empty = 0;
  for (int n = -h.n_max; n <= h.n_max; ++n) {
    if (n != 0 && h.at(n) > 0) ++non_empty;
  }
  if (non_empty < 10) {
    throw std::runtime_error(
        "histogram fit needs at least 10 non-empty off-center bins, have " +
        std::to_string(non_empty));
  }

  // Shape-fixed Poisson maximum likelihood over the bins the model can
  // populate: c = sum M / sum s with s the unit-c shape.
  double sum_m = 0.0;
  double sum_s = 0.0;
  std::uint64_t used = 0;
  for (int n = -h.n_max; n <= h.n_max; ++n) {
    if (n == 0) continue;
    const double s = theoretical_m(n, p_a, p_b, 1.0);
    if (s <= 0.0) continue;
    sum_m += static_cast<double>(h.at(n));
    sum_s += s;
    ++used;
  }
  if (sum_s <= 0.0 || used == 0) {
    throw std::runtime_error("histogram model carries no off-center mass");
  }

  FitResult fit;
  fit.c = sum_m / sum_s;
  fit.c_sigma = std::sqrt(sum_m) / sum_s;
  fit.bins_used = used;
  fit.dof = used > 0 ? used - 1 : 0;
  for (int n = -h.n_max; n <= h.n_max; ++n) {
    if (n == 0) continue;
    const double model = theoretical_m(n, p_a, p_b, fit.c);
    if (model <= 0.0) continue;
    const double diff = static_cast<double>(h.at(n)) - model;
    fit.chi2 += diff * diff / model;
  }
  fit.shape_flag =
      fit.dof > 0 && fit.chi2 / static_cast<double>(fit.dof) > 5.0;
  return fit;
}

NormalizedHistogram normalize(const Histogram& h, double p_a, double p_b,
                              double c) {
  const double denom = c * p_a * p_b;
  if (denom == 0.0) {
    throw std::invalid_argument("histogram normalizer is zero");
  }
  NormalizedHistogram out;
  out.n_max = h.n_max;
  out.values.resize(h.counts.size());
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    out.values[k] = static_cast<double>(h.counts[k]) / denom;
  }
  return out;
}

double theoretical_offcenter_mass(double p_a, double p_b, int n_max) {
  const double qa = 1.0 - p_a;
  const double qb = 1.0 - p_b;
  return p_a * qb * (1.0 - std::pow(qb, n_max)) +
         p_b * qa * (1.0 - std::pow(qa, n_max));
}

}  // namespace ahsps
