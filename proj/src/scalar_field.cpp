#include "extrap/scalar_field.hpp"

#include "extrap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace extrap {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

std::string axis_summary(const std::vector<GridAxis>& axes) {
  std::ostringstream os;
  for (const auto& a : axes)
    os << " [" << a.origin << ", " << a.max() << "] x" << a.count;
  return os.str();
}

}  // namespace

ScalarField::ScalarField(std::vector<GridAxis> axes, RealVector values)
    : axes_(std::move(axes)), values_(std::move(values)) {
  if (axes_.size() != 2 && axes_.size() != 4)
    throw InputError("ScalarField: expected 2 or 4 real axes");
  Index total = 1;
  for (const auto& a : axes_) {
    if (!(a.spacing > 0.0)) throw InputError("ScalarField: spacing must be > 0");
    if (a.count < 8) throw InputError("ScalarField: need at least 8 nodes per axis");
    total *= a.count;
  }
  if (values_.size() != total)
    throw InputError("ScalarField: value count does not match grid");
  bool any_finite = false;
  for (Index i = 0; i < values_.size(); ++i) {
    double v = values_[i];
    if (std::isnan(v) || v == kPosInf)
      throw InputError("ScalarField: values must be finite or -inf");
    any_finite = any_finite || std::isfinite(v);
  }
  if (!any_finite) throw InputError("ScalarField: all values are -inf");
}

double ScalarField::min_spacing() const {
  double h = kPosInf;
  for (const auto& a : axes_) h = std::min(h, a.spacing);
  return h;
}

Index ScalarField::flat_index(std::span<const Index> idx) const {
  Index flat = 0;
  for (std::size_t a = 0; a < axes_.size(); ++a) flat = flat * axes_[a].count + idx[a];
  return flat;
}

double ScalarField::node(std::span<const Index> idx) const {
  return values_[flat_index(idx)];
}

void ScalarField::attach_exact(Evaluator1 f) {
  if (complex_dims() != 1) throw InputError("attach_exact: field is not 1-dimensional");
  exact1_ = std::move(f);
}

void ScalarField::attach_exact(Evaluator2 f) {
  if (complex_dims() != 2) throw InputError("attach_exact: field is not 2-dimensional");
  exact2_ = std::move(f);
}

bool ScalarField::contains(Complex z) const {
  if (complex_dims() != 1) return false;
  const double eps = 1e-12;
  return z.real() >= axes_[0].origin - eps && z.real() <= axes_[0].max() + eps &&
         z.imag() >= axes_[1].origin - eps && z.imag() <= axes_[1].max() + eps;
}

bool ScalarField::contains(Complex z1, Complex z2) const {
  if (complex_dims() != 2) return false;
  const double eps = 1e-12;
  double c[4] = {z1.real(), z1.imag(), z2.real(), z2.imag()};
  for (int a = 0; a < 4; ++a)
    if (c[a] < axes_[a].origin - eps || c[a] > axes_[a].max() + eps) return false;
  return true;
}

bool ScalarField::contains_circle(Complex center, double radius) const {
  if (complex_dims() != 1) return false;
  const double eps = 1e-12;
  return center.real() - radius >= axes_[0].origin - eps &&
         center.real() + radius <= axes_[0].max() + eps &&
         center.imag() - radius >= axes_[1].origin - eps &&
         center.imag() + radius <= axes_[1].max() + eps;
}

double ScalarField::interpolate(std::span<const double> coords) const {
  const std::size_t n_axes = axes_.size();
  Index cell[4];
  double frac[4];
  for (std::size_t a = 0; a < n_axes; ++a) {
    const auto& ax = axes_[a];
    double u = (coords[a] - ax.origin) / ax.spacing;
    if (u < -1e-9 || u > static_cast<double>(ax.count - 1) + 1e-9) {
      std::ostringstream os;
      os << "evaluation point leaves the grid" << axis_summary(axes_);
      throw OutOfDomainError(os.str());
    }
    u = std::clamp(u, 0.0, static_cast<double>(ax.count - 1));
    Index lo = std::min(static_cast<Index>(u), ax.count - 2);
    cell[a] = lo;
    frac[a] = u - static_cast<double>(lo);
  }
  const std::size_t corners = std::size_t{1} << n_axes;
  double sum = 0.0;
  for (std::size_t mask = 0; mask < corners; ++mask) {
    double w = 1.0;
    Index idx[4];
    for (std::size_t a = 0; a < n_axes; ++a) {
      bool hi = (mask >> a) & 1u;
      w *= hi ? frac[a] : 1.0 - frac[a];
      idx[a] = cell[a] + (hi ? 1 : 0);
    }
    if (w == 0.0) continue;
    double v = node(std::span<const Index>(idx, n_axes));
    if (v == kNegInf) return kNegInf;  // -inf poisons any cell that touches it
    sum += w * v;
  }
  return sum;
}

double ScalarField::eval(Complex z) const {
  if (complex_dims() != 1) throw InputError("eval(z): field is 2-dimensional");
  if (!contains(z)) {
    std::ostringstream os;
    os << "point (" << z.real() << ", " << z.imag() << ") leaves the grid"
       << axis_summary(axes_);
    throw OutOfDomainError(os.str());
  }
  if (exact1_) return exact1_(z);
  double coords[2] = {z.real(), z.imag()};
  return interpolate(std::span<const double>(coords, 2));
}

double ScalarField::eval(Complex z1, Complex z2) const {
  if (complex_dims() != 2) throw InputError("eval(z1,z2): field is 1-dimensional");
  if (!contains(z1, z2)) {
    std::ostringstream os;
    os << "point leaves the grid" << axis_summary(axes_);
    throw OutOfDomainError(os.str());
  }
  if (exact2_) return exact2_(z1, z2);
  double coords[4] = {z1.real(), z1.imag(), z2.real(), z2.imag()};
  return interpolate(std::span<const double>(coords, 4));
}

ScalarField sample_field(GridAxis re, GridAxis im, const ScalarField::Evaluator1& f,
                         bool keep_exact) {
  RealVector values(re.count * im.count);
  Index k = 0;
  for (Index i = 0; i < re.count; ++i)
    for (Index j = 0; j < im.count; ++j)
      values[k++] = f(Complex(re.origin + re.spacing * static_cast<double>(i),
                              im.origin + im.spacing * static_cast<double>(j)));
  ScalarField field({re, im}, std::move(values));
  if (keep_exact) field.attach_exact(f);
  return field;
}

ScalarField sample_field(const std::vector<GridAxis>& axes,
                         const ScalarField::Evaluator2& f, bool keep_exact) {
  if (axes.size() != 4) throw InputError("sample_field: need 4 axes for C^2");
  Index total = axes[0].count * axes[1].count * axes[2].count * axes[3].count;
  RealVector values(total);
  Index k = 0;
  for (Index i0 = 0; i0 < axes[0].count; ++i0)
    for (Index i1 = 0; i1 < axes[1].count; ++i1)
      for (Index i2 = 0; i2 < axes[2].count; ++i2)
        for (Index i3 = 0; i3 < axes[3].count; ++i3)
          values[k++] = f(Complex(axes[0].origin + axes[0].spacing * i0,
                                  axes[1].origin + axes[1].spacing * i1),
                          Complex(axes[2].origin + axes[2].spacing * i2,
                                  axes[3].origin + axes[3].spacing * i3));
  ScalarField field(axes, std::move(values));
  if (keep_exact) field.attach_exact(f);
  return field;
}

// ---------------------------------------------------------------------------
// RadiusSchedule
// ---------------------------------------------------------------------------

RadiusSchedule RadiusSchedule::geometric(double r0, double ratio, int n,
                                         int angular_nodes) {
  if (!(r0 > 0.0) || !(ratio > 0.0) || ratio >= 1.0 || n < 1)
    throw ScheduleError("RadiusSchedule::geometric: need r0 > 0, ratio in (0,1), n >= 1");
  RadiusSchedule s;
  s.angular_nodes = angular_nodes;
  s.radii.resize(n);
  double r = r0;
  for (int i = 0; i < n; ++i, r *= ratio) s.radii[i] = r;
  s.validate();
  return s;
}

void RadiusSchedule::validate() const {
  if (angular_nodes < 16) throw ScheduleError("RadiusSchedule: need >= 16 angular nodes");
  if (radii.empty()) throw ScheduleError("RadiusSchedule: empty radius list");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ScheduleError("RadiusSchedule: radii must be > 0");
    if (i > 0 && !(radii[i] < radii[i - 1]))
      throw ScheduleError("RadiusSchedule: radii must be strictly decreasing");
  }
}

void RadiusSchedule::validate_for(const ScalarField& field) const {
  validate();
  if (field.has_exact()) return;  // no interpolation in play
  double h = field.min_spacing();
  if (radii.back() < 2.0 * h) {
    std::ostringstream os;
    os << "RadiusSchedule: smallest radius " << radii.back()
       << " is below 2 * grid spacing " << 2.0 * h
       << "; interpolated circle means are unreliable there";
    throw ScheduleError(os.str());
  }
}

// ---------------------------------------------------------------------------
// Circle means and lambda
// ---------------------------------------------------------------------------

double circle_mean(const std::function<double(Complex)>& u, Complex center,
                   double radius, int angular_nodes) {
  if (angular_nodes < 16) throw ScheduleError("circle_mean: need >= 16 angular nodes");
  if (!(radius > 0.0)) throw InputError("circle_mean: radius must be > 0");
  // trapezoid on a periodic integrand == plain average over equispaced angles
  double sum = 0.0;
  for (int j = 0; j < angular_nodes; ++j) {
    double theta = kTwoPi * static_cast<double>(j) / angular_nodes;
    double v = u(center + radius * Complex(std::cos(theta), std::sin(theta)));
    if (v == kNegInf) return kNegInf;
    sum += v;
  }
  return sum / angular_nodes;
}

double circle_mean(const ScalarField& field, Complex center, double radius,
                   int angular_nodes) {
  if (field.complex_dims() != 1)
    throw InputError("circle_mean: need a 1-dimensional field (or a slice)");
  if (!field.contains_circle(center, radius))
    throw OutOfDomainError("circle_mean: circle exits the grid");
  return circle_mean([&field](Complex z) { return field.eval(z); }, center,
                     radius, angular_nodes);
}

namespace {

double lambda_from_defects(const std::function<double(double)>& mean_at_radius,
                           double center_value, const RadiusSchedule& schedule) {
  if (schedule.radii.size() < 3)
    throw ScheduleError("lambda_estimate: need at least 3 radii for the r^2 fit");
  if (center_value == kNegInf) return kPosInf;
  // least squares for q(r) = L + c r^2
  double s0 = 0, s1 = 0, s2 = 0, b0 = 0, b1 = 0;
  for (double r : schedule.radii) {
    double m = mean_at_radius(r);
    if (m == kNegInf) return kNegInf;
    double q = (m - center_value) / (r * r);
    double x = r * r;
    s0 += 1.0;
    s1 += x;
    s2 += x * x;
    b0 += q;
    b1 += q * x;
  }
  double det = s0 * s2 - s1 * s1;
  if (std::abs(det) < 1e-30)
    throw ScheduleError("lambda_estimate: degenerate radius schedule");
  return (s2 * b0 - s1 * b1) / det;
}

}  // namespace

double lambda_estimate(const std::function<double(Complex)>& u, Complex center,
                       const RadiusSchedule& schedule) {
  schedule.validate();
  return lambda_from_defects(
      [&](double r) { return circle_mean(u, center, r, schedule.angular_nodes); },
      u(center), schedule);
}

double lambda_estimate(const ScalarField& field, Complex center,
                       const RadiusSchedule& schedule) {
  schedule.validate_for(field);
  for (double r : schedule.radii)
    if (!field.contains_circle(center, r))
      throw OutOfDomainError("lambda_estimate: schedule circle exits the grid");
  return lambda_from_defects(
      [&](double r) { return circle_mean(field, center, r, schedule.angular_nodes); },
      field.eval(center), schedule);
}

double directional_lambda(const ScalarField& field2d, const AffineDisc& disc,
                          const RadiusSchedule& schedule) {
  if (field2d.complex_dims() != 2)
    throw InputError("directional_lambda: need a 2-dimensional field");
  schedule.validate();
  auto pullback = [&](Complex zeta) {
    return field2d.eval(disc.base[0] + zeta * disc.dir[0],
                        disc.base[1] + zeta * disc.dir[1]);
  };
  return lambda_estimate(pullback, Complex(0, 0), schedule);
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

namespace {

struct WorstDefect {
  double violation = -kPosInf;
  Index flat = -1;
  double x = 0.0, y = 0.0;
};

WorstDefect worse_of(const WorstDefect& a, const WorstDefect& b) {
  if (b.violation > a.violation) return b;
  if (b.violation == a.violation && b.flat >= 0 && (a.flat < 0 || b.flat < a.flat))
    return b;
  return a;
}

}  // namespace

Verdict subharmonic_verdict(const ScalarField& field,
                            const RadiusSchedule& schedule, double tol) {
  if (field.complex_dims() != 1)
    throw InputError("subharmonic_verdict: need a 1-dimensional field");
  schedule.validate_for(field);
  const auto& ax = field.axes();
  const double r_max = schedule.max_radius();

  std::vector<std::pair<Index, Index>> centers;
  for (Index i = 0; i < ax[0].count; ++i) {
    for (Index j = 0; j < ax[1].count; ++j) {
      Complex c(ax[0].origin + ax[0].spacing * static_cast<double>(i),
                ax[1].origin + ax[1].spacing * static_cast<double>(j));
      if (field.contains_circle(c, r_max)) centers.emplace_back(i, j);
    }
  }
  if (centers.empty())
    throw ScheduleError("subharmonic_verdict: grid too small for any test point");

  const std::size_t tile = 64;
  const std::size_t tiles = (centers.size() + tile - 1) / tile;
  auto scan_tile = [&](std::size_t ti) {
    WorstDefect worst;
    std::size_t begin = ti * tile, end = std::min(begin + tile, centers.size());
    for (std::size_t k = begin; k < end; ++k) {
      auto [i, j] = centers[k];
      Complex c(ax[0].origin + ax[0].spacing * static_cast<double>(i),
                ax[1].origin + ax[1].spacing * static_cast<double>(j));
      Index idx[2] = {i, j};
      double u0 = field.node(std::span<const Index>(idx, 2));
      if (u0 == kNegInf) continue;  // sub-mean-value holds trivially
      for (double r : schedule.radii) {
        double m = circle_mean(field, c, r, schedule.angular_nodes);
        double violation = (m == kNegInf) ? kPosInf : u0 - m;
        WorstDefect cand{violation, field.flat_index(std::span<const Index>(idx, 2)),
                         c.real(), c.imag()};
        worst = worse_of(worst, cand);
      }
    }
    return worst;
  };
  WorstDefect worst =
      parallel_reduce(tiles, WorstDefect{}, scan_tile,
                      [](const WorstDefect& a, const WorstDefect& b) {
                        return worse_of(a, b);
                      });

  std::optional<Witness> witness;
  if (worst.flat >= 0) witness = Witness{"grid node", {worst.x, worst.y}};
  return Verdict::of(std::max(0.0, worst.violation), tol, witness);
}

Verdict psh_verdict(const ScalarField& field2d,
                    const std::vector<Eigen::Vector2cd>& directions,
                    const RadiusSchedule& schedule, double tol) {
  if (field2d.complex_dims() != 2)
    throw InputError("psh_verdict: need a 2-dimensional field");
  if (directions.empty()) throw InputError("psh_verdict: no directions supplied");
  schedule.validate();
  const auto& ax = field2d.axes();
  const double h = field2d.min_spacing();
  const double r_max = schedule.max_radius();

  // base lattice: interior fractions of each axis, snapped to nodes
  const double fracs[3] = {0.25, 0.5, 0.75};
  std::vector<std::array<double, 4>> bases;
  for (double f0 : fracs)
    for (double f1 : fracs)
      for (double f2 : fracs)
        for (double f3 : fracs) {
          auto snap = [](const GridAxis& a, double f) {
            Index i = static_cast<Index>(std::llround(f * static_cast<double>(a.count - 1)));
            return a.origin + a.spacing * static_cast<double>(i);
          };
          bases.push_back({snap(ax[0], f0), snap(ax[1], f1), snap(ax[2], f2), snap(ax[3], f3)});
        }
  std::sort(bases.begin(), bases.end());
  bases.erase(std::unique(bases.begin(), bases.end()), bases.end());

  double worst = -kPosInf;
  std::optional<Witness> witness;
  std::size_t slices_tested = 0;
  for (const auto& dir_raw : directions) {
    if (dir_raw.norm() == 0.0) throw InputError("psh_verdict: zero direction");
    Eigen::Vector2cd d = dir_raw / dir_raw.norm();
    for (const auto& b : bases) {
      // largest zeta-square [-L, L]^2 whose image stays in the grid
      double L = kPosInf;
      double comps[4] = {b[0], b[1], b[2], b[3]};
      for (int f = 0; f < 2; ++f) {
        double mag = std::abs(d[f]);
        if (mag < 1e-14) continue;
        for (int r = 0; r < 2; ++r) {
          const GridAxis& a = ax[2 * f + r];
          double slack = std::min(comps[2 * f + r] - a.origin, a.max() - comps[2 * f + r]);
          L = std::min(L, slack / (std::sqrt(2.0) * mag));
        }
      }
      if (!(L > 0.0) || !std::isfinite(L)) continue;
      Index nodes = static_cast<Index>(std::floor(2.0 * L / h)) + 1;
      if (nodes > 33) nodes = 33;
      if (nodes < 8) continue;
      double span2 = h * static_cast<double>(nodes - 1);
      if (span2 * 0.5 < r_max + 2.0 * h) continue;  // no room for the largest circle
      GridAxis zax{-0.5 * span2, h, nodes};
      Complex b1(b[0], b[1]), b2(b[2], b[3]);
      auto slice_fn = [&](Complex zeta) {
        return field2d.eval(b1 + zeta * d[0], b2 + zeta * d[1]);
      };
      ScalarField slice = sample_field(zax, zax, slice_fn, field2d.has_exact());
      Verdict v = subharmonic_verdict(slice, schedule, tol);
      ++slices_tested;
      if (v.max_violation > worst) {
        worst = v.max_violation;
        if (v.witness) {
          Complex zeta(v.witness->where[0], v.witness->where[1]);
          Complex w1 = b1 + zeta * d[0], w2 = b2 + zeta * d[1];
          witness = Witness{"point", {w1.real(), w1.imag(), w2.real(), w2.imag()}};
        }
      }
    }
  }
  if (slices_tested == 0)
    throw ScheduleError("psh_verdict: grid too small for any line slice");
  std::ostringstream note;
  note << slices_tested << " line slices tested";
  return Verdict::of(std::max(0.0, worst), tol, witness, note.str());
}

Verdict sequence_shape_verdict(std::span<const double> t,
                               std::span<const double> v, SequenceShape shape,
                               double tol) {
  if (t.size() != v.size()) throw InputError("sequence verdict: size mismatch");
  std::size_t min_size = shape == SequenceShape::Convex ? 3 : 2;
  if (t.size() < min_size) throw InputError("sequence verdict: too few samples");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw InputError("sequence verdict: t must be strictly increasing");

  double worst = -kPosInf;
  double where = t[0];
  auto consider = [&](double violation, double at) {
    if (violation > worst) {
      worst = violation;
      where = at;
    }
  };
  if (shape == SequenceShape::Convex) {
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      double right = (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
      double left = (v[i] - v[i - 1]) / (t[i] - t[i - 1]);
      double d2 = (right - left) / (t[i + 1] - t[i - 1]);
      consider(-d2, t[i]);
    }
  } else {
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      double diff = v[i + 1] - v[i];
      consider(shape == SequenceShape::Decreasing ? diff : -diff, t[i + 1]);
    }
  }
  return Verdict::of(std::max(0.0, worst), tol, Witness{"t", {where}});
}

}  // namespace extrap
