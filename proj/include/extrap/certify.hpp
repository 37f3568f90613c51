#pragma once

#include "extrap/bergman.hpp"
#include "extrap/metric_family.hpp"
#include "extrap/scalar_field.hpp"

#include <string>
#include <vector>

namespace extrap {

// ---------------------------------------------------------------------------
// Theorem-level certificates. Each certificate separates hypothesis checks
// from conclusion checks and never claims a conclusion implied by failed
// hypotheses, even if the conclusion happens to hold numerically.
// ---------------------------------------------------------------------------

struct Tolerances {
  double rho = 1e-6;             // headline extension ratio slack
  double curvature = 5e-4;       // semipositivity slack for quadrature-backed families
  double curvature_step = 0.02;  // finite-difference step in s for those families
  double dual_convexity = 1e-6;
  double dual_decrease = 1e-9;
  double primal_increase = 1e-9;
  double verdict = 1e-6;         // generic scans
};

/// Rectangular s-grid in a half plane Re s > sigma0.
struct HalfPlaneGrid {
  double re_lo = 0.25, re_hi = 3.0;
  double im_lo = -1.0, im_hi = 1.0;
  Index re_n = 12, im_n = 12;
  std::vector<double> re_line() const;  // the t-samples Re s
};

struct Thm31Report {
  Verdict curvature_decreasing;  // hypothesis of (i)
  Verdict re_invariant_norm;     // hypothesis of (ii)
  Verdict bounded_evidence;      // hypothesis of (ii): nonincreasing tail on the grid
  Verdict log_norm_subharmonic;  // conclusion of (i), always measured
  Verdict norm_log_convex;       // conclusion support for (ii)
  Verdict norm_decreasing;       // conclusion of (ii)
  bool part_i_implied = false;
  bool part_ii_implied = false;
};

/// Certifies the hypotheses and conclusions of the norm-monotonicity theorem
/// for operator families over a half plane: curvature-decreasing probes, the
/// subharmonicity of log ||A||, and (under Re-invariance and grid-level
/// boundedness evidence) convexity and decrease of ||A||(t).
Thm31Report thm31_certificate(const OperatorFamily& op, const HalfPlaneGrid& grid,
                              const RadiusSchedule& schedule, double step,
                              double tol);

struct Thm32Report {
  Verdict re_invariant;       // hypothesis
  Verdict semipositive;       // hypothesis: K >= -tol at the probe lattice
  Verdict dual_log_convex;    // dual-boundedness mechanics
  Verdict dual_decreasing;
  Verdict primal_increasing;  // conclusion
  bool implied = false;

  std::vector<double> t_grid;
  std::vector<std::vector<double>> primal;  // primal norms per probe, per t
  std::vector<std::vector<double>> dual;    // dual norms per probe, per t
};

struct Thm32Options {
  std::vector<double> t_grid;
  double curvature_step = 0.02;
  double curvature_tol = 5e-4;
  double convex_tol = 1e-6;
  double decrease_tol = 1e-9;
  double increase_tol = 1e-9;
  int curvature_probe_count = 5;  // t-values sampled from the grid
};

/// Gram-backed variant: norms are quotient norms of Y-classes, duals are the
/// induced functionals, curvature probes run on the quotient metric family.
/// Probes are Y-coefficient vectors (the class of the scenario data plus low
/// Y-degrees by default).
Thm32Report thm32_certificate(const GramFamily& fam,
                              const std::vector<Vector>& primal_probes,
                              const std::vector<Vector>& dual_probes,
                              const Thm32Options& opt);

/// Plain metric-family variant (probes live on the fiber itself).
Thm32Report thm32_certificate(const HermitianMetricFamily& fam,
                              const std::vector<Vector>& primal_probes,
                              const std::vector<Vector>& dual_probes,
                              const Thm32Options& opt);

// ---------------------------------------------------------------------------
// Extension scenarios.
// ---------------------------------------------------------------------------

struct ExtensionScenario {
  std::string name;
  ModelDomain domain;
  SubmanifoldSpec submanifold;
  Cutoff cutoff = Cutoff::smoothed_hinge(4.0, 0.1);
  int degree = 8;
  Vector boundary_f;          // Y-basis coefficients
  std::vector<double> t_grid;
  Tolerances tol;

  void validate() const;
};

struct CutoffSweepEntry {
  double slope;
  double limit_sq;           // extrapolated lim p_t(f)^2
  double ratio_to_boundary;  // limit_sq / ||f||_Y^2
  double mass;               // mass factor of that cutoff
};

struct ProvenanceInfo {
  int radial_nodes = 0;
  int angular_nodes = 0;
  int degree = 0;
  double t_max = 0.0;
  double curvature_step = 0.0;
  std::vector<double> jitters;
  std::vector<std::string> warnings;
};

struct ExtensionReport {
  std::string scenario;
  std::vector<double> t_grid;
  std::vector<double> p_t;       // p_t(class of f)
  std::vector<double> p_dual_t;  // p*_t of the leading Y functional
  std::vector<double> gram_min_eig;  // per grid t
  std::vector<double> gram_max_eig;
  Thm32Report thm32;

  CoefficientVector extension;   // q_0-minimal extension of f
  double extension_norm_sq = 0.0;  // c_m-normalized plain L2 norm^2
  double boundary_sq = 0.0;        // ||f||_Y^2
  std::string boundary_method;
  double rho = 0.0;                // extension_norm_sq / boundary_sq
  Verdict headline;                // rho <= 1 + tol

  double mass = 1.0;               // C_chi for the scenario cutoff
  double limit_sq_lo = 0.0;        // bracket for lim p_t(f)^2
  double limit_sq_hi = 0.0;
  double limit_over_mass_boundary = 0.0;  // limit / (C_chi ||f||^2): the soft reading
  double limit_over_boundary = 0.0;       // limit / ||f||^2: the steep-limit reading
  std::vector<CutoffSweepEntry> cutoff_sweep;

  ProvenanceInfo provenance;

  bool all_passed() const;
  int exit_status() const;  // 0 pass, 1 verdict violation
};

ExtensionReport run_extension_scenario(const ExtensionScenario& sc);

// ---------------------------------------------------------------------------
// Soft-cutoff mass probe: compares the weighted-mass curve of a fixed section
// against the sharp transverse limit of its restriction.
// ---------------------------------------------------------------------------

struct Prop41Table {
  std::vector<double> t;
  std::vector<double> soft;      // e^{(m-n)t} weighted mass of psi at t
  double limit = 0.0;            // extrapolated t -> infinity value
  double sharp = 0.0;            // transverse sharp-limit norm of psi|Y
  double ratio = 0.0;            // limit / sharp
  double expected_mass = 1.0;    // mass_factor(cutoff, codim)
};

Prop41Table prop41_probe(const ExtensionScenario& sc, const CoefficientVector& psi,
                         const std::vector<double>& t_grid = {});

/// Built-in scenario catalog: disc-point, bidisc-line, bidisc-diagonal,
/// bidisc-point.
ExtensionScenario catalog_scenario(const std::string& name);
std::vector<std::string> catalog_scenario_names();

}  // namespace extrap
