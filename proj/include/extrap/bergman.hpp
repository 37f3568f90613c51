#pragma once

#include "extrap/cutoff.hpp"
#include "extrap/metric_family.hpp"
#include "extrap/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace extrap {

// ---------------------------------------------------------------------------
// Model domains: unit disc (m = 1) and unit bidisc (m = 2), with a tensor
// Gauss-Legendre x trapezoid quadrature per complex factor.
// ---------------------------------------------------------------------------

enum class DomainShape { Disc, Bidisc };

struct QuadratureSpec {
  int radial = 48;   // Gauss-Legendre nodes per radial panel, >= 32
  int angular = 64;  // angular nodes (trapezoid, or per adapted panel), >= 32
};

struct ModelDomain {
  DomainShape shape = DomainShape::Disc;
  QuadratureSpec quad;

  int complex_dim() const { return shape == DomainShape::Disc ? 1 : 2; }
  static ModelDomain disc(QuadratureSpec q = {});
  static ModelDomain bidisc(QuadratureSpec q = {});
};

// ---------------------------------------------------------------------------
// Submanifolds of the model domains with their defining functions r, scaled
// so r maps into [0, 1] and log r is plurisubharmonic.
//
//   PointInDisc:    Y = {0} in the disc,          r = |z|^2
//   CoordinateLine: Y = {z2 = 0} in the bidisc,   r = |z2|^2
//   Diagonal:       Y = {z1 = z2} in the bidisc,  r = |z1 - z2|^2 / 4
//   PointInBidisc:  Y = {0} in the bidisc,        r = (|z1|^2 + |z2|^2) / 2
// ---------------------------------------------------------------------------

enum class SubmanifoldKind { PointInDisc, CoordinateLine, Diagonal, PointInBidisc };

struct SubmanifoldSpec {
  SubmanifoldKind kind = SubmanifoldKind::PointInDisc;

  int ambient_dim() const;  // m
  int dim() const;          // n
  int codim() const { return ambient_dim() - dim(); }
  double defining_r(Complex z1, Complex z2 = Complex(0, 0)) const;
  std::string name() const;

  static SubmanifoldSpec parse(const std::string& name);
};

/// c_m = 2^m: top-degree wedge integrals of coefficient functions equal
/// c_m times the Lebesgue integral of |coefficient|^2.
double volume_density(int m);

// ---------------------------------------------------------------------------
// Coefficient vectors: sections trivialized against the global coordinate
// frame, stored as monomial coefficients with per-factor degree <= degree.
// Index order: disc k = a; bidisc idx = a1 * (degree + 1) + a2.
// ---------------------------------------------------------------------------

Index monomial_count(int dims, int degree);
std::pair<int, int> monomial_exponents(int dims, int degree, Index idx);
Index monomial_index(int dims, int degree, int a1, int a2);

struct CoefficientVector {
  int dims = 1;
  int degree = 0;
  Vector coeffs;

  Complex eval(Complex z) const;
  Complex eval(Complex z1, Complex z2) const;
};

/// c_m-normalized unweighted L2 norm squared (closed monomial integrals).
double plain_l2_norm_sq(const CoefficientVector& psi);

// ---------------------------------------------------------------------------
// GramFamily: t -> G(t), the Hermitian matrix of weighted inner products
//
//   G_ab(t) = e^{(m-n) t} c_m Integral z^a conj(z)^b e^{-chi(t + log r)} dV.
//
// Product-weight geometries (PointInDisc, CoordinateLine) use a radial rule
// whose panels follow the weight's transition layer exactly; the coupled
// geometries (Diagonal, PointInBidisc) use the plain tensor rule with an
// angular rule split at the layer crossings. Entries are cached per t and
// assembly parallelizes over radial tiles with a fixed-order reduction.
// ---------------------------------------------------------------------------
class GramFamily {
 public:
  GramFamily(ModelDomain domain, SubmanifoldSpec submanifold, Cutoff cutoff,
             int degree);

  const ModelDomain& domain() const;
  const SubmanifoldSpec& submanifold() const;
  const Cutoff& cutoff() const;
  int degree() const;
  int dims() const;
  Index basis_size() const;

  /// Largest t the configured quadrature resolves; gram(t) beyond it throws
  /// ResolutionError carrying this value.
  double t_max() const;

  const Matrix& gram(double t) const;

  /// View as a metric family in s (depends on Re s only).
  HermitianMetricFamily metric_family() const;

  std::shared_ptr<ConditionLog> log() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

// ---------------------------------------------------------------------------
// Restriction to Y and the induced quotient data.
// ---------------------------------------------------------------------------

/// Number of Y-basis monomials representable at this degree.
Index y_basis_size(SubmanifoldKind kind, int degree);

/// Matrix of the restriction-to-Y map in monomial bases (rows: Y monomials).
/// Its kernel is a basis of the ideal of sections vanishing on Y.
RealMatrix restriction_constraints(SubmanifoldKind kind, int degree);

/// Pads f with zeros to the full Y basis; throws FeasibilityError if f needs
/// a higher degree than the family carries.
Vector pad_boundary_data(const GramFamily& fam, const Vector& f);

/// The quotient machinery built once per family: ideal basis (kernel of the
/// restriction), the Schur-complement metric family on a fixed complement,
/// and class coordinates of Y data on that complement.
class QuotientView {
 public:
  explicit QuotientView(const GramFamily& fam);

  const HermitianMetricFamily& family() const { return quotient_; }
  Index fiber_rank() const { return comp_count_; }
  /// Complement-basis coordinates of the class of f (pads f first).
  Vector class_coordinates(const Vector& f) const;
  /// p_t of the class of f.
  double norm(double t, const Vector& f) const;

 private:
  GramFamily fam_;
  Matrix restriction_;
  Matrix kernel_;
  HermitianMetricFamily quotient_;
  Matrix basis_;  // [complement picker | kernel], square
  Index comp_count_ = 0;
};

/// Quotient norm p_t of the class of f: the minimum of q_t over all sections
/// restricting to f. Computed through the Schur-complement quotient metric.
double quotient_norm(const GramFamily& fam, double t, const Vector& f);

/// The unique q_t-minimal section with restriction f (KKT solve on G(t)).
CoefficientVector minimal_extension(const GramFamily& fam, double t, const Vector& f);

/// Dual norm q*_t of the functional induced by Y-coefficient data l:
/// q*_t(L)^2 = L G(t)^{-1} L* with L = l composed with the restriction.
double dual_functional_norm(const GramFamily& fam, double t, const Vector& l);

// ---------------------------------------------------------------------------
// Boundary norms: the transverse-limit L2 norm of data on Y.
// ---------------------------------------------------------------------------

enum class BoundaryMethod { ClosedForm, SharpLimit, SoftLimit };

struct BoundaryOptions {
  BoundaryMethod method = BoundaryMethod::ClosedForm;
  Cutoff cutoff = Cutoff::hinge(4.0);            // SoftLimit weight
  std::vector<double> eps_schedule = {0.2, 0.1, 0.05, 0.025};  // SharpLimit
  double soft_t_top = 10.0;                       // SoftLimit anchor (clipped to t_max)
};

double boundary_norm_sq(const ModelDomain& domain, const SubmanifoldSpec& sub,
                        const Vector& f, const BoundaryOptions& opts = {});

/// Canonical extension of Y data used by the limit-based norms and probes:
/// constants for points, f(z1) for the coordinate line, f((z1+z2)/2) for the
/// diagonal.
CoefficientVector canonical_extension(const SubmanifoldSpec& sub, int dims,
                                      int degree, const Vector& f);

}  // namespace extrap
