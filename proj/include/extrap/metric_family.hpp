#pragma once

#include "extrap/scalar_field.hpp"
#include "extrap/types.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace extrap {

// ---------------------------------------------------------------------------
// HermitianMetricFamily: s -> H(s), a Hermitian positive definite matrix on a
// fixed fiber C^k, varying with a complex parameter. Families are immutable
// after construction and safe to share across threads; evaluation validates
// hermiticity and positivity.
// ---------------------------------------------------------------------------
class HermitianMetricFamily {
 public:
  using Evaluator = std::function<Matrix(Complex)>;

  HermitianMetricFamily(Index rank, Evaluator evaluator, bool re_invariant = false);

  Index rank() const { return rank_; }
  bool re_invariant() const { return re_invariant_; }

  /// H(s), symmetrized; throws PositivityError if not positive definite and
  /// InputError if the evaluator output is not Hermitian to tolerance.
  Matrix matrix(Complex s) const;

  double norm_sq(Complex s, const Vector& v) const;
  double norm(Complex s, const Vector& v) const;

  /// Smallest admissible finite-difference step (> 0 for grid-sampled
  /// families, 0 otherwise).
  double min_step() const { return min_step_; }
  void set_min_step(double h) { min_step_ = h; }

  std::shared_ptr<ConditionLog> log() const { return log_; }
  void adopt_log(std::shared_ptr<ConditionLog> log) { log_ = std::move(log); }

  /// Spot-check that H(s) = H(Re s) at the given points.
  void verify_re_invariance(std::span<const Complex> points, double tol) const;

 private:
  Index rank_;
  Evaluator evaluator_;
  bool re_invariant_;
  double min_step_ = 0.0;
  std::shared_ptr<ConditionLog> log_ = std::make_shared<ConditionLog>();
};

// ---------------------------------------------------------------------------
// Curvature. Sign convention: for the rank-one family H = exp(-phi),
// chern_curvature returns -d^2 phi / ds dsbar and kobayashi_exact returns
// +d^2 phi / ds dsbar / 2, so H = exp(-|s|^2) has K = 1/2.
// ---------------------------------------------------------------------------

/// Theta(s) = H^{-1}(d_sbar d_s H) - H^{-1}(d_sbar H) H^{-1}(d_s H), with the
/// parameter derivatives taken by central differences of the given step.
Matrix chern_curvature(const HermitianMetricFamily& fam, Complex s, double step);

/// K(v) = -(v* H Theta v) / (2 v* H v).
double kobayashi_exact(const HermitianMetricFamily& fam, Complex s,
                       const Vector& v, double step);

/// Dual family s -> transpose(H(s)^{-1}); a functional with coefficient
/// column l acts as l^T v, and its dual norm squared is l* H_dual l.
HermitianMetricFamily dual_metric(const HermitianMetricFamily& fam);

/// Quotient by the span of the ideal basis columns: the Schur-complement
/// form on a fixed coordinate complement. complement_indices() on the result
/// is implied by construction order; the quotient fiber has rank k - j.
HermitianMetricFamily quotient_metric(const HermitianMetricFamily& fam,
                                      const Matrix& ideal_basis);

/// Coordinate axes chosen as the quotient representative basis (deterministic).
std::vector<Index> quotient_complement_indices(const Matrix& ideal_basis);

// ---------------------------------------------------------------------------
// Holomorphic operator families A(s) = sum_j C_j s^j between two metrized
// fibers.
// ---------------------------------------------------------------------------
class OperatorFamily {
 public:
  OperatorFamily(std::vector<Matrix> coeffs, HermitianMetricFamily domain,
                 HermitianMetricFamily codomain);

  Matrix at(Complex s) const;
  const HermitianMetricFamily& domain() const { return domain_; }
  const HermitianMetricFamily& codomain() const { return codomain_; }

 private:
  std::vector<Matrix> coeffs_;
  HermitianMetricFamily domain_;
  HermitianMetricFamily codomain_;
};

/// Largest generalized singular value of A(s) between the two inner products:
/// sqrt of the top eigenvalue of A* H_F A v = lambda H_E v.
double operator_norm(const OperatorFamily& op, Complex s);

/// Checks K_codomain(A v) <= K_domain(v) + tol at each probe (s, v). Probes
/// with A v = 0 are skipped, with a note.
Verdict decreases_curvature_verdict(const OperatorFamily& op,
                                    std::span<const std::pair<Complex, Vector>> probes,
                                    double step, double tol);

// ---------------------------------------------------------------------------
// Section dictionaries: finite families of holomorphic polynomial sections
// through a prescribed fiber value, used to bound the section infimum in the
// Kobayashi curvature from below.
// ---------------------------------------------------------------------------
struct PolynomialSection {
  std::vector<Vector> coeffs;  // phi(s) = sum coeffs[j] s^j
  Vector at(Complex s) const;
};

struct SectionDictionary {
  Complex base;
  Vector value;
  std::vector<PolynomialSection> entries;
  void validate(double tol = 1e-9) const;  // every entry passes phi(base) = value
};

/// General norm family on a fixed fiber (not necessarily Hilbertian).
struct NormFamily {
  Index rank = 0;
  std::function<double(Complex, const Vector&)> p;
};

NormFamily norm_family_of(const HermitianMetricFamily& fam);

/// -min over dictionary entries of lambda_estimate(log p(phi(s))) at the
/// dictionary base: a lower bound for the Kobayashi curvature, exact as the
/// dictionary approaches the jet-matching optimum.
double kobayashi_dictionary(const NormFamily& norms, const SectionDictionary& dict,
                            const RadiusSchedule& schedule);
double kobayashi_dictionary(const HermitianMetricFamily& fam,
                            const SectionDictionary& dict,
                            const RadiusSchedule& schedule);

/// Dual norm by maximizing |l^T v| / p(v) over a deterministic unit-sphere
/// sample. Supported for rank <= 3 only and flagged approximate by name.
double dual_norm_sampled(const NormFamily& norms, Complex s, const Vector& l,
                         int samples = 20000);

/// Named analytic families: flat1, flat2, flat3, gauss1, gaussre1,
/// gaussdiag2, hyb2, expgrow1, expgrow2.
HermitianMetricFamily metric_catalog(const std::string& name);
std::vector<std::string> metric_catalog_names();

}  // namespace extrap
