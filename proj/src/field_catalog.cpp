#include "extrap/field_catalog.hpp"

#include <cmath>

namespace extrap {

namespace {

GridAxis axis(double lo, double hi, Index count) {
  return GridAxis{lo, (hi - lo) / static_cast<double>(count - 1), count};
}

double sq(double x) { return x * x; }

ScalarField field_1d(double lo, double hi, const ScalarField::Evaluator1& f) {
  GridAxis a = axis(lo, hi, 49);
  return sample_field(a, a, f);
}

ScalarField field_2d(GridAxis a1re, GridAxis a1im, GridAxis a2re, GridAxis a2im,
                     const ScalarField::Evaluator2& f) {
  return sample_field({a1re, a1im, a2re, a2im}, f);
}

}  // namespace

ScalarField catalog_field(const std::string& name) {
  if (name == "zsq")
    return field_1d(-1.0, 1.0, [](Complex z) { return std::norm(z); });
  if (name == "rez3")
    return field_1d(-1.0, 1.0, [](Complex z) { return (z * z * z).real(); });
  if (name == "zquart") {
    GridAxis re = axis(-0.6, 1.6, 56), im = axis(-1.1, 1.1, 56);
    return sample_field(re, im, [](Complex z) { return sq(std::norm(z)); });
  }
  if (name == "log1pzsq")
    return field_1d(-1.0, 1.0, [](Complex z) { return std::log1p(std::norm(z)); });
  if (name == "negzsq")
    return field_1d(-1.0, 1.0, [](Complex z) { return -std::norm(z); });
  if (name == "logdist22")
    return field_1d(0.0, 1.0,
                    [](Complex z) { return std::log(std::abs(z - Complex(2.0, 2.0))); });
  if (name == "logmax")
    return field_1d(-1.0, 1.0, [](Complex z) {
      double m = std::abs(z);
      return m == 0.0 ? -3.0 : std::max(std::log(m), -3.0);
    });

  GridAxis sym = axis(-1.0, 1.0, 9);
  if (name == "z1sq")
    return field_2d(sym, sym, sym, sym,
                    [](Complex z1, Complex) { return std::norm(z1); });
  if (name == "negz1sq")
    return field_2d(sym, sym, sym, sym,
                    [](Complex z1, Complex) { return -std::norm(z1); });
  if (name == "z12sq")
    return field_2d(sym, sym, sym, sym,
                    [](Complex z1, Complex z2) { return std::norm(z1 + z2); });
  if (name == "logz12") {
    // box keeps |z1| >= 0.2, away from the log singularity at the origin
    GridAxis re1 = axis(0.2, 1.2, 9);
    return field_2d(re1, sym, sym, sym, [](Complex z1, Complex z2) {
      return std::log(std::norm(z1) + std::norm(z2));
    });
  }
  if (name == "logdiag") {
    // z1 and z2 boxes separated so |z1 - z2| >= 1 on the whole grid
    GridAxis re1 = axis(0.5, 1.5, 9), re2 = axis(-1.5, -0.5, 9);
    GridAxis im = axis(-0.5, 0.5, 9);
    return field_2d(re1, im, re2, im, [](Complex z1, Complex z2) {
      return std::log(std::norm(z1 - z2));
    });
  }
  throw InputError("unknown catalog field '" + name + "'");
}

std::vector<std::string> catalog_field_names() {
  return {"zsq",    "rez3",   "zquart", "log1pzsq", "negzsq", "logdist22",
          "logmax", "z1sq",   "z12sq",  "logz12",   "negz1sq", "logdiag"};
}

}  // namespace extrap
