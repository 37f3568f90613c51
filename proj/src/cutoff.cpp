#include "extrap/cutoff.hpp"

#include "extrap/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace extrap {

Cutoff Cutoff::sharp() { return Cutoff{CutoffKind::Sharp, 1.0, 0.0}; }

Cutoff Cutoff::hinge(double slope) {
  if (!(slope > 0.0)) throw InputError("cutoff: slope must be > 0");
  return Cutoff{CutoffKind::Hinge, slope, 0.0};
}

Cutoff Cutoff::smoothed_hinge(double slope, double width) {
  if (!(slope > 0.0)) throw InputError("cutoff: slope must be > 0");
  if (!(width >= 0.0)) throw InputError("cutoff: width must be >= 0");
  if (width == 0.0) return hinge(slope);
  return Cutoff{CutoffKind::SmoothedHinge, slope, width};
}

std::string Cutoff::describe() const {
  std::ostringstream os;
  switch (kind) {
    case CutoffKind::Sharp:
      os << "sharp";
      break;
    case CutoffKind::Hinge:
      os << "hinge,K=" << slope;
      break;
    case CutoffKind::SmoothedHinge:
      os << "smoothedHinge,K=" << slope << ",w=" << width;
      break;
  }
  return os.str();
}

Cutoff parse_cutoff(const std::string& spec) {
  std::istringstream is(spec);
  std::string kind;
  if (!std::getline(is, kind, ',')) throw InputError("cutoff: empty spec");
  if (kind == "sharp") return Cutoff::sharp();
  double slope = 0.0, width = 0.0;
  char comma = 0;
  if (!(is >> slope)) throw InputError("cutoff '" + spec + "': missing slope");
  if (kind == "hinge") return Cutoff::hinge(slope);
  if (kind == "smoothedHinge" || kind == "smoothed-hinge") {
    if (is >> comma >> width) return Cutoff::smoothed_hinge(slope, width);
    return Cutoff::smoothed_hinge(slope, 0.1);
  }
  throw InputError("cutoff: unknown kind '" + kind + "'");
}

double chi_eval(const Cutoff& c, double x) {
  if (x <= 0.0) return 0.0;  // includes x = -inf
  switch (c.kind) {
    case CutoffKind::Sharp:
      return kPosInf;
    case CutoffKind::Hinge:
      return c.slope * x;
    case CutoffKind::SmoothedHinge:
      if (x < c.width) return c.slope * x * x / (2.0 * c.width);
      return c.slope * (x - 0.5 * c.width);
  }
  return 0.0;
}

double mass_factor(const Cutoff& c, int d) {
  if (d < 1) throw InputError("mass_factor: codimension must be >= 1");
  if (c.kind == CutoffKind::Sharp) return 1.0;
  if (!(c.slope > static_cast<double>(d))) {
    std::ostringstream os;
    os << "mass_factor: cutoff slope K=" << c.slope
       << " must exceed d=" << d
       << " or the weighted mass diverges as t grows";
    throw DivergenceError(os.str());
  }
  // chi vanishes on (-inf, 0], so that piece integrates exactly to 1/d.
  double left = 1.0 / d;
  // On [0, X] the integrand exp(d x - chi(x)) decays like exp((d - K) x)
  // once past the smoothing zone; pick X so the remainder tail is far below
  // the 1e-12 quadrature tolerance, then add the analytic tail.
  double decay = c.slope - d;
  double x_cut = c.width + 45.0 / decay;
  auto integrand = [&](double x) { return std::exp(d * x - chi_eval(c, x)); };
  double middle = adaptive_simpson(integrand, 0.0, x_cut, 1e-13);
  double tail = integrand(x_cut) / decay;
  return d * (left + middle + tail);
}

}  // namespace extrap
