#include "extrap/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace extrap {

namespace {

Verdict worst_of(const Verdict& a, const Verdict& b) {
  Verdict v = (b.max_violation > a.max_violation) ? b : a;
  v.passed = a.passed && b.passed;
  v.tolerance = std::min(a.tolerance, b.tolerance);
  return v;
}

std::vector<double> spread_values(const std::vector<double>& grid, int count) {
  std::vector<double> out;
  if (grid.empty()) return out;
  int n = static_cast<int>(grid.size());
  count = std::min(count, n);
  for (int i = 0; i < count; ++i) {
    int idx = (count == 1) ? 0 : static_cast<int>(std::llround(
                                     static_cast<double>(i) * (n - 1) /
                                     static_cast<double>(count - 1)));
    out.push_back(grid[static_cast<std::size_t>(idx)]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<double> HalfPlaneGrid::re_line() const {
  std::vector<double> t(static_cast<std::size_t>(re_n));
  for (Index i = 0; i < re_n; ++i)
    t[static_cast<std::size_t>(i)] =
        re_lo + (re_hi - re_lo) * static_cast<double>(i) / static_cast<double>(re_n - 1);
  return t;
}

// ---------------------------------------------------------------------------
// Operator-family certificate
// ---------------------------------------------------------------------------

Thm31Report thm31_certificate(const OperatorFamily& op, const HalfPlaneGrid& grid,
                              const RadiusSchedule& schedule, double step,
                              double tol) {
  if (grid.re_n < 8 || grid.im_n < 8)
    throw InputError("thm31_certificate: need at least an 8x8 s-grid");
  Thm31Report rep;

  // probe lattice for the curvature-decreasing hypothesis
  std::vector<std::pair<Complex, Vector>> probes;
  Index k = op.domain().rank();
  std::vector<Vector> fibers;
  for (Index j = 0; j < std::min<Index>(k, 3); ++j)
    fibers.push_back(Vector::Unit(k, j));
  fibers.push_back(Vector::Ones(k));
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 3; ++j) {
      Complex s(grid.re_lo + (grid.re_hi - grid.re_lo) * i / 4.0,
                grid.im_lo + (grid.im_hi - grid.im_lo) * j / 2.0);
      for (const auto& v : fibers) probes.emplace_back(s, v);
    }
  }
  rep.curvature_decreasing = decreases_curvature_verdict(
      op, std::span<const std::pair<Complex, Vector>>(probes), step, tol);

  auto ts = grid.re_line();
  std::vector<double> norm_t(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    norm_t[i] = operator_norm(op, Complex(ts[i], 0.0));

  // Re-invariance of the norm, spot-checked on grid corners and center
  {
    double worst = 0.0;
    for (double im : {grid.im_lo, 0.5 * (grid.im_lo + grid.im_hi), grid.im_hi}) {
      for (double re : {grid.re_lo, 0.5 * (grid.re_lo + grid.re_hi), grid.re_hi}) {
        double a = operator_norm(op, Complex(re, im));
        double b = operator_norm(op, Complex(re, 0.0));
        worst = std::max(worst, std::abs(a - b) / (std::abs(b) + 1.0));
      }
    }
    rep.re_invariant_norm = Verdict::of(worst, 1e-8);
  }

  // boundedness evidence: nonincreasing tail on the last third of the grid
  {
    std::size_t start = ts.size() - std::max<std::size_t>(3, ts.size() / 3);
    std::vector<double> tt(ts.begin() + start, ts.end());
    std::vector<double> vv(norm_t.begin() + start, norm_t.end());
    Verdict tail = sequence_shape_verdict(tt, vv, SequenceShape::Decreasing, tol);
    tail.note = "grid-level evidence only (nonincreasing tail)";
    rep.bounded_evidence = tail;
  }

  // conclusion (i): log ||A|| subharmonic over the s-grid
  {
    GridAxis re{grid.re_lo,
                (grid.re_hi - grid.re_lo) / static_cast<double>(grid.re_n - 1),
                grid.re_n};
    GridAxis im{grid.im_lo,
                (grid.im_hi - grid.im_lo) / static_cast<double>(grid.im_n - 1),
                grid.im_n};
    auto log_norm = [&op](Complex s) {
      double n = operator_norm(op, s);
      return n <= 0.0 ? kNegInf : std::log(n);
    };
    ScalarField field = sample_field(re, im, log_norm, true);
    rep.log_norm_subharmonic = subharmonic_verdict(field, schedule, tol);
  }

  // conclusion (ii): convexity of log ||A||(t), decrease of ||A||(t)
  {
    std::vector<double> log_norm(norm_t.size());
    for (std::size_t i = 0; i < norm_t.size(); ++i)
      log_norm[i] = norm_t[i] <= 0.0 ? kNegInf : std::log(norm_t[i]);
    rep.norm_log_convex =
        sequence_shape_verdict(ts, log_norm, SequenceShape::Convex, tol);
    rep.norm_decreasing =
        sequence_shape_verdict(ts, norm_t, SequenceShape::Decreasing, tol);
  }

  rep.part_i_implied = rep.curvature_decreasing.passed;
  rep.part_ii_implied = rep.curvature_decreasing.passed &&
                        rep.re_invariant_norm.passed && rep.bounded_evidence.passed;
  return rep;
}

// ---------------------------------------------------------------------------
// Norm-family certificate
// ---------------------------------------------------------------------------

namespace {

struct NormProbeSet {
  std::function<double(double, const Vector&)> primal;  // p_t(probe)
  std::function<double(double, const Vector&)> dual;    // p*_t(probe)
  HermitianMetricFamily curvature_family;
  std::function<Vector(const Vector&)> fiber_of;  // probe -> curvature fiber vector
  Verdict re_invariant;
};

Thm32Report run_thm32(const NormProbeSet& set,
                      const std::vector<Vector>& primal_probes,
                      const std::vector<Vector>& dual_probes,
                      const Thm32Options& opt) {
  if (opt.t_grid.size() < 3)
    throw InputError("thm32_certificate: need at least 3 t-grid points");
  for (std::size_t i = 1; i < opt.t_grid.size(); ++i)
    if (!(opt.t_grid[i] > opt.t_grid[i - 1]))
      throw InputError("thm32_certificate: t-grid must be strictly increasing");
  if (primal_probes.empty() || dual_probes.empty())
    throw InputError("thm32_certificate: need at least one probe on each side");

  Thm32Report rep;
  rep.t_grid = opt.t_grid;
  rep.re_invariant = set.re_invariant;

  // hypothesis: semipositive curvature at the probe lattice
  {
    std::vector<double> t_probes = spread_values(opt.t_grid, opt.curvature_probe_count);
    double worst = -kPosInf;
    std::optional<Witness> witness;
    for (double t : t_probes) {
      for (const auto& probe : primal_probes) {
        Vector v = set.fiber_of(probe);
        if (v.norm() == 0.0) continue;
        double kappa = kobayashi_exact(set.curvature_family, Complex(t, 0.0), v,
                                       opt.curvature_step);
        if (-kappa > worst) {
          worst = -kappa;
          witness = Witness{"t", {t}};
        }
      }
    }
    rep.semipositive = Verdict::of(std::max(0.0, worst), opt.curvature_tol, witness);
  }

  // dual boundedness mechanics: log p*_t convex and decreasing per probe
  {
    Verdict convex = Verdict::of(0.0, opt.convex_tol);
    Verdict decrease = Verdict::of(0.0, opt.decrease_tol);
    for (const auto& l : dual_probes) {
      std::vector<double> row(opt.t_grid.size()), log_row(opt.t_grid.size());
      for (std::size_t i = 0; i < opt.t_grid.size(); ++i) {
        row[i] = set.dual(opt.t_grid[i], l);
        log_row[i] = row[i] <= 0.0 ? kNegInf : std::log(row[i]);
      }
      rep.dual.push_back(row);
      convex = worst_of(convex, sequence_shape_verdict(opt.t_grid, log_row,
                                                       SequenceShape::Convex,
                                                       opt.convex_tol));
      decrease = worst_of(decrease,
                          sequence_shape_verdict(opt.t_grid, log_row,
                                                 SequenceShape::Decreasing,
                                                 opt.decrease_tol));
    }
    rep.dual_log_convex = convex;
    rep.dual_decreasing = decrease;
  }

  // conclusion: p_t increasing per probe
  {
    Verdict increase = Verdict::of(0.0, opt.increase_tol);
    for (const auto& v : primal_probes) {
      std::vector<double> row(opt.t_grid.size());
      for (std::size_t i = 0; i < opt.t_grid.size(); ++i)
        row[i] = set.primal(opt.t_grid[i], v);
      rep.primal.push_back(row);
      increase = worst_of(increase, sequence_shape_verdict(opt.t_grid, row,
                                                           SequenceShape::Increasing,
                                                           opt.increase_tol));
    }
    rep.primal_increasing = increase;
  }

  rep.implied = rep.re_invariant.passed && rep.semipositive.passed &&
                rep.dual_log_convex.passed && rep.dual_decreasing.passed;
  return rep;
}

}  // namespace

Thm32Report thm32_certificate(const GramFamily& fam,
                              const std::vector<Vector>& primal_probes,
                              const std::vector<Vector>& dual_probes,
                              const Thm32Options& opt) {
  auto view = std::make_shared<QuotientView>(fam);
  NormProbeSet set;
  set.primal = [view](double t, const Vector& f) { return view->norm(t, f); };
  GramFamily fcopy = fam;
  set.dual = [fcopy](double t, const Vector& l) {
    return dual_functional_norm(fcopy, t, l);
  };
  set.curvature_family = view->family();
  set.fiber_of = [view](const Vector& f) { return view->class_coordinates(f); };
  set.re_invariant = Verdict::of(0.0, 1e-12, std::nullopt,
                                 "weighted norms depend on Re s by construction");
  return run_thm32(set, primal_probes, dual_probes, opt);
}

Thm32Report thm32_certificate(const HermitianMetricFamily& fam,
                              const std::vector<Vector>& primal_probes,
                              const std::vector<Vector>& dual_probes,
                              const Thm32Options& opt) {
  NormProbeSet set;
  HermitianMetricFamily primal = fam;
  HermitianMetricFamily dual = dual_metric(fam);
  set.primal = [primal](double t, const Vector& v) {
    return primal.norm(Complex(t, 0.0), v);
  };
  set.dual = [dual](double t, const Vector& l) {
    Matrix hd = dual.matrix(Complex(t, 0.0));
    return std::sqrt(std::max(0.0, std::real(l.dot(hd * l))));
  };
  set.curvature_family = fam;
  set.fiber_of = [](const Vector& v) { return v; };
  if (fam.re_invariant()) {
    double defect = 0.0;
    if (!opt.t_grid.empty()) {
      for (Complex s : {Complex(opt.t_grid.front(), 0.4),
                        Complex(opt.t_grid.back(), -0.7)}) {
        Matrix a = fam.matrix(s), b = fam.matrix(Complex(s.real(), 0.0));
        defect = std::max(defect, (a - b).norm() / (b.norm() + 1.0));
      }
    }
    set.re_invariant = Verdict::of(defect, 1e-9);
  } else {
    set.re_invariant = Verdict::of(1.0, 1e-9, std::nullopt,
                                   "family does not claim Re-invariance");
  }
  return run_thm32(set, primal_probes, dual_probes, opt);
}

// ---------------------------------------------------------------------------
// Extension scenarios
// ---------------------------------------------------------------------------

void ExtensionScenario::validate() const {
  if (boundary_f.size() == 0) throw InputError("scenario: boundary data is empty");
  if (t_grid.size() < 3) throw InputError("scenario: t-grid needs at least 3 points");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw InputError("scenario: t-grid must be strictly increasing");
  if (degree < 0) throw InputError("scenario: degree must be >= 0");
  if (!(tol.rho > 0.0) || !(tol.curvature > 0.0))
    throw InputError("scenario: tolerances must be positive");
}

namespace {

std::vector<Vector> default_y_probes(const GramFamily& fam, const Vector& f) {
  Index rows = y_basis_size(fam.submanifold().kind, fam.degree());
  std::vector<Vector> probes;
  probes.push_back(f);
  for (Index j = 0; j < std::min<Index>(rows, 3); ++j) {
    Vector e = Vector::Unit(rows, j);
    if (f.size() == rows && (e - f).norm() < 1e-14) continue;
    probes.push_back(e);
  }
  return probes;
}

double aitken_limit(double e0, double e1, double e2) {
  double d1 = e1 - e0, d2 = e2 - e1;
  double denom = d2 - d1;
  if (std::abs(denom) <= 1e-14 * (std::abs(e2) + 1.0)) return e2;
  double limit = e2 - d2 * d2 / denom;
  // a correction larger than the value itself means the tail is not yet
  // geometric; keep the last sample
  if (!std::isfinite(limit) || std::abs(limit - e2) > std::abs(e2)) return e2;
  return limit;
}

}  // namespace

ExtensionReport run_extension_scenario(const ExtensionScenario& sc) {
  sc.validate();
  GramFamily fam(sc.domain, sc.submanifold, sc.cutoff, sc.degree);
  if (sc.t_grid.back() > fam.t_max())
    throw ResolutionError("scenario t-grid exceeds the resolved range", fam.t_max());

  ExtensionReport rep;
  rep.scenario = sc.name;
  rep.t_grid = sc.t_grid;

  Thm32Options opt;
  opt.t_grid = sc.t_grid;
  opt.curvature_step = sc.tol.curvature_step;
  opt.curvature_tol = sc.tol.curvature;
  opt.convex_tol = sc.tol.dual_convexity;
  opt.decrease_tol = sc.tol.dual_decrease;
  opt.increase_tol = sc.tol.primal_increase;
  std::vector<Vector> primal = default_y_probes(fam, sc.boundary_f);
  std::vector<Vector> dual;
  Index rows = y_basis_size(sc.submanifold.kind, sc.degree);
  for (Index j = 0; j < std::min<Index>(rows, 3); ++j)
    dual.push_back(Vector::Unit(rows, j));
  rep.thm32 = thm32_certificate(fam, primal, dual, opt);
  rep.p_t = rep.thm32.primal.front();
  rep.p_dual_t = rep.thm32.dual.front();

  for (double t : sc.t_grid) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(fam.gram(t));
    rep.gram_min_eig.push_back(eig.eigenvalues().minCoeff());
    rep.gram_max_eig.push_back(eig.eigenvalues().maxCoeff());
  }

  // minimal extension at t = 0 and the headline ratio
  rep.extension = minimal_extension(fam, 0.0, sc.boundary_f);
  rep.extension_norm_sq = plain_l2_norm_sq(rep.extension);
  BoundaryOptions bopt;
  if (sc.submanifold.kind == SubmanifoldKind::Diagonal) {
    bopt.method = BoundaryMethod::SharpLimit;
    rep.boundary_method = "sharpLimit";
  } else {
    bopt.method = BoundaryMethod::ClosedForm;
    rep.boundary_method = "closedForm";
  }
  rep.boundary_sq = boundary_norm_sq(sc.domain, sc.submanifold, sc.boundary_f, bopt);
  rep.rho = rep.extension_norm_sq / rep.boundary_sq;
  rep.headline = Verdict::of(rep.rho - 1.0, sc.tol.rho, std::nullopt,
                             "plain L2 mass of the minimal extension against the "
                             "boundary norm");

  // limit bracket from the monotone tail
  {
    double p_top = rep.p_t.back();
    double p_prev = rep.p_t[rep.p_t.size() - 2];
    double inc = std::max(0.0, p_top - p_prev);
    rep.limit_sq_lo = p_top * p_top;
    rep.limit_sq_hi = (p_top + inc) * (p_top + inc);
  }
  rep.mass = mass_factor(sc.cutoff, sc.submanifold.codim());
  rep.limit_over_mass_boundary = rep.limit_sq_lo / (rep.mass * rep.boundary_sq);
  rep.limit_over_boundary = rep.limit_sq_lo / rep.boundary_sq;

  // steepening-cutoff sweep: the limit bound tightens toward the boundary norm
  {
    int c = sc.submanifold.codim();
    for (double factor : {2.0, 4.0, 8.0}) {
      double slope = factor * c;
      Cutoff steep = sc.cutoff.kind == CutoffKind::SmoothedHinge
                         ? Cutoff::smoothed_hinge(slope, sc.cutoff.width)
                         : Cutoff::hinge(slope);
      GramFamily sweep_fam(sc.domain, sc.submanifold, steep, sc.degree);
      QuotientView view(sweep_fam);
      std::size_t n = sc.t_grid.size();
      double e0 = view.norm(sc.t_grid[n - 3], sc.boundary_f);
      double e1 = view.norm(sc.t_grid[n - 2], sc.boundary_f);
      double e2 = view.norm(sc.t_grid[n - 1], sc.boundary_f);
      double limit_sq = aitken_limit(e0 * e0, e1 * e1, e2 * e2);
      rep.cutoff_sweep.push_back(CutoffSweepEntry{
          slope, limit_sq, limit_sq / rep.boundary_sq, mass_factor(steep, c)});
    }
  }

  rep.provenance.radial_nodes = sc.domain.quad.radial;
  rep.provenance.angular_nodes = sc.domain.quad.angular;
  rep.provenance.degree = sc.degree;
  rep.provenance.t_max = fam.t_max();
  rep.provenance.curvature_step = sc.tol.curvature_step;
  rep.provenance.jitters = fam.log()->jitters();
  rep.provenance.warnings = fam.log()->warnings();
  return rep;
}

bool ExtensionReport::all_passed() const {
  return headline.passed && thm32.re_invariant.passed && thm32.semipositive.passed &&
         thm32.dual_log_convex.passed && thm32.dual_decreasing.passed &&
         thm32.primal_increasing.passed;
}

int ExtensionReport::exit_status() const { return all_passed() ? 0 : 1; }

// ---------------------------------------------------------------------------
// Weighted-mass probe
// ---------------------------------------------------------------------------

Prop41Table prop41_probe(const ExtensionScenario& sc, const CoefficientVector& psi,
                         const std::vector<double>& t_grid) {
  sc.validate();
  if (psi.dims != sc.domain.complex_dim() || psi.degree != sc.degree)
    throw InputError("prop41_probe: section does not match the scenario basis");
  GramFamily fam(sc.domain, sc.submanifold, sc.cutoff, sc.degree);
  Prop41Table table;
  table.t = t_grid.empty() ? sc.t_grid : t_grid;
  if (table.t.back() > fam.t_max())
    throw ResolutionError("prop41 t-grid exceeds the resolved range", fam.t_max());
  for (double t : table.t)
    table.soft.push_back(std::real(psi.coeffs.dot(fam.gram(t) * psi.coeffs)));
  std::size_t n = table.soft.size();
  table.limit = n >= 3 ? aitken_limit(table.soft[n - 3], table.soft[n - 2],
                                      table.soft[n - 1])
                       : table.soft.back();

  Matrix r = restriction_constraints(sc.submanifold.kind, sc.degree).cast<Complex>();
  Vector f = r * psi.coeffs;
  BoundaryOptions bopt;
  bopt.method = BoundaryMethod::SharpLimit;
  table.sharp = boundary_norm_sq(sc.domain, sc.submanifold, f, bopt);
  table.ratio = table.limit / table.sharp;
  table.expected_mass = mass_factor(sc.cutoff, sc.submanifold.codim());
  return table;
}

// ---------------------------------------------------------------------------
// Scenario catalog
// ---------------------------------------------------------------------------

ExtensionScenario catalog_scenario(const std::string& name) {
  ExtensionScenario sc;
  sc.name = name;
  auto grid = [](double lo, double hi, double step) {
    std::vector<double> t;
    for (double x = lo; x <= hi + 1e-12; x += step) t.push_back(x);
    return t;
  };
  if (name == "disc-point") {
    sc.domain = ModelDomain::disc({48, 64});
    sc.submanifold = SubmanifoldSpec::parse("point0");
    sc.cutoff = Cutoff::smoothed_hinge(4.0, 0.1);
    sc.degree = 12;
    sc.boundary_f = Vector::Ones(1);
    sc.t_grid = grid(0.0, 8.0, 0.25);
    return sc;
  }
  if (name == "bidisc-line") {
    sc.domain = ModelDomain::bidisc({32, 32});
    sc.submanifold = SubmanifoldSpec::parse("coordinateLine");
    sc.cutoff = Cutoff::smoothed_hinge(4.0, 0.1);
    sc.degree = 6;
    sc.boundary_f = Vector::Ones(1);
    sc.t_grid = grid(0.0, 6.0, 0.5);
    sc.tol.rho = 1e-4;
    return sc;
  }
  if (name == "bidisc-diagonal") {
    sc.domain = ModelDomain::bidisc({64, 32});
    sc.submanifold = SubmanifoldSpec::parse("diagonal");
    sc.cutoff = Cutoff::smoothed_hinge(4.0, 0.1);
    sc.degree = 8;
    sc.boundary_f = Vector::Ones(1);
    sc.t_grid = grid(0.0, 4.0, 0.5);
    sc.tol.rho = 1e-3;
    return sc;
  }
  if (name == "bidisc-point") {
    sc.domain = ModelDomain::bidisc({48, 32});
    sc.submanifold = SubmanifoldSpec::parse("point00");
    sc.cutoff = Cutoff::hinge(8.0);
    sc.degree = 4;
    sc.boundary_f = Vector::Ones(1);
    sc.t_grid = grid(0.0, 4.5, 0.5);
    sc.tol.rho = 1e-3;
    return sc;
  }
  throw InputError("unknown scenario '" + name + "'");
}

std::vector<std::string> catalog_scenario_names() {
  return {"disc-point", "bidisc-line", "bidisc-diagonal", "bidisc-point"};
}

}  // namespace extrap
