#include "ahsps/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ahsps {

namespace {

void require_range(double v, double lo, double hi, const std::string& name) {
  if (!(v >= lo && v <= hi)) {
    throw std::invalid_argument(name + " out of range [" +
                                std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  }
}

void require_nonneg(double v, const std::string& name) {
  if (!(v >= 0.0)) {
    throw std::invalid_argument(name + " must be non-negative");
  }
}

}  // namespace

PhotonStatistics PhotonStatistics::from_p1_p2(double p1, double p2) {
  PhotonStatistics s;
  s.p1 = p1;
  s.p2 = p2;
  s.p0 = 1.0 - p1 - p2;
  return s;
}

bool PhotonStatistics::valid(double tol) const {
  if (!(p0 >= -tol && p0 <= 1.0 + tol)) return false;
  if (!(p1 >= -tol && p1 <= 1.0 + tol)) return false;
  if (!(p2 >= -tol && p2 <= 1.0 + tol)) return false;
  return std::abs(p0 + p1 + p2 - 1.0) <= tol;
}

void validate(const DetectorConfig& det, const std::string& label) {
  // A blind detector makes the statistics solve singular.
  if (!(det.efficiency > 0.0 && det.efficiency <= 1.0)) {
    throw std::invalid_argument(label + ".efficiency out of range (0, 1]");
  }
  // At 1/2 the exclusive dark-count rule erases the photon signal; above
  // it the click rule turns into an inverter.
  if (!(det.dark_count_prob >= 0.0 && det.dark_count_prob < 0.5)) {
    throw std::invalid_argument(label +
                                ".dark_count_prob out of range [0, 0.5)");
  }
}

void validate(const SourceConfig& src) {
  require_nonneg(src.pump_power, "pump_power");
  require_nonneg(src.pair_efficiency, "pair_efficiency");
  require_range(src.herald_coupling, 0.0, 1.0, "herald_coupling");
  require_range(src.herald_detector_eff, 0.0, 1.0, "herald_detector_eff");
  require_nonneg(src.herald_dark_rate, "herald_dark_rate");
  require_range(src.coupling_p1, 0.0, 1.0, "coupling_p1");
  if (!(src.gate_width > 0.0)) {
    throw std::invalid_argument("gate_width must be positive");
  }
  require_nonneg(src.dead_time, "dead_time");
  require_range(src.attenuation, 0.0, 1.0, "attenuation");
  require_range(src.gate_acceptance, 0.0, 1.0, "gate_acceptance");
}

double heralding_rate(const SourceConfig& src) {
  return src.attenuation * src.herald_coupling * src.herald_detector_eff *
         src.pair_rate();
}

double multi_photon_prob(const SourceConfig& src) {
  return 0.5 * src.coupling_p1 * src.coupling_p1 * src.gate_width *
         src.pair_rate();
}

RegimeCheck check_regime(const SourceConfig& src) {
  const double p2 = multi_photon_prob(src);
  RegimeCheck rc;
  rc.physical = p2 < 1.0 - src.coupling_p1;
  rc.single_photon_dominant = p2 < src.coupling_p1;
  return rc;
}

PhotonStatistics statistics_of(const SourceConfig& src) {
  return PhotonStatistics::from_p1_p2(src.coupling_p1,
                                      multi_photon_prob(src));
}

FigureOfMerit figure_of_merit(const PhotonStatistics& stats,
                              double herald_rate_hz) {
  FigureOfMerit f;
  if (stats.p2 == 0.0) {
    f.f_value = std::numeric_limits<double>::infinity();
    return f;
  }
  f.f_value = stats.p1 * stats.p1 * stats.p1 * herald_rate_hz /
              (2.0 * stats.p2);
  return f;
}

FigureOfMerit figure_of_merit_physical(const SourceConfig& src) {
  FigureOfMerit f;
  f.f_value = src.coupling_p1 * src.herald_coupling *
              src.herald_detector_eff / src.gate_width;
  return f;
}

double poissonian_reference(double /*p1*/) {
  // Poissonian photon statistics are g2 = 1 at every mean photon number.
  return 1.0;
}

double suppression_factor(double g2) { return 1.0 / g2; }

}  // namespace ahsps
