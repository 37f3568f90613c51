#include "extrap/bergman.hpp"

#include "extrap/parallel.hpp"
#include "extrap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace extrap {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

// ---------------------------------------------------------------------------
// Domains and submanifolds
// ---------------------------------------------------------------------------

namespace {
void validate_quad(const QuadratureSpec& q) {
  if (q.radial < 32 || q.angular < 32)
    throw InputError("quadrature spec: need at least 32 radial and 32 angular nodes");
}
}  // namespace

ModelDomain ModelDomain::disc(QuadratureSpec q) {
  validate_quad(q);
  return ModelDomain{DomainShape::Disc, q};
}

ModelDomain ModelDomain::bidisc(QuadratureSpec q) {
  validate_quad(q);
  return ModelDomain{DomainShape::Bidisc, q};
}

int SubmanifoldSpec::ambient_dim() const {
  return kind == SubmanifoldKind::PointInDisc ? 1 : 2;
}

int SubmanifoldSpec::dim() const {
  switch (kind) {
    case SubmanifoldKind::PointInDisc:
    case SubmanifoldKind::PointInBidisc:
      return 0;
    default:
      return 1;
  }
}

double SubmanifoldSpec::defining_r(Complex z1, Complex z2) const {
  switch (kind) {
    case SubmanifoldKind::PointInDisc:
      return std::norm(z1);
    case SubmanifoldKind::CoordinateLine:
      return std::norm(z2);
    case SubmanifoldKind::Diagonal:
      return 0.25 * std::norm(z1 - z2);
    case SubmanifoldKind::PointInBidisc:
      return 0.5 * (std::norm(z1) + std::norm(z2));
  }
  return 0.0;
}

std::string SubmanifoldSpec::name() const {
  switch (kind) {
    case SubmanifoldKind::PointInDisc:
      return "point0";
    case SubmanifoldKind::CoordinateLine:
      return "coordinateLine";
    case SubmanifoldKind::Diagonal:
      return "diagonal";
    case SubmanifoldKind::PointInBidisc:
      return "point00";
  }
  return {};
}

SubmanifoldSpec SubmanifoldSpec::parse(const std::string& name) {
  if (name == "point0") return {SubmanifoldKind::PointInDisc};
  if (name == "coordinateLine" || name == "coordinate-line")
    return {SubmanifoldKind::CoordinateLine};
  if (name == "diagonal") return {SubmanifoldKind::Diagonal};
  if (name == "point00") return {SubmanifoldKind::PointInBidisc};
  throw InputError("unknown submanifold '" + name + "'");
}

double volume_density(int m) {
  if (m != 1 && m != 2) throw InputError("volume_density: m must be 1 or 2");
  return m == 1 ? 2.0 : 4.0;
}

// ---------------------------------------------------------------------------
// Monomial bookkeeping
// ---------------------------------------------------------------------------

Index monomial_count(int dims, int degree) {
  if (degree < 0) throw InputError("degree must be >= 0");
  Index per = degree + 1;
  return dims == 1 ? per : per * per;
}

std::pair<int, int> monomial_exponents(int dims, int degree, Index idx) {
  if (dims == 1) return {static_cast<int>(idx), 0};
  Index per = degree + 1;
  return {static_cast<int>(idx / per), static_cast<int>(idx % per)};
}

Index monomial_index(int dims, int degree, int a1, int a2) {
  if (dims == 1) return a1;
  return static_cast<Index>(a1) * (degree + 1) + a2;
}

Complex CoefficientVector::eval(Complex z) const {
  if (dims != 1) throw InputError("CoefficientVector::eval: wrong arity");
  Complex acc = 0.0;
  for (Index i = coeffs.size() - 1; i >= 0; --i) acc = acc * z + coeffs[i];
  return acc;
}

Complex CoefficientVector::eval(Complex z1, Complex z2) const {
  if (dims != 2) throw InputError("CoefficientVector::eval: wrong arity");
  Index per = degree + 1;
  Complex acc = 0.0;
  for (Index a1 = per - 1; a1 >= 0; --a1) {
    Complex inner = 0.0;
    for (Index a2 = per - 1; a2 >= 0; --a2)
      inner = inner * z2 + coeffs[a1 * per + a2];
    acc = acc * z1 + inner;
  }
  return acc;
}

double plain_l2_norm_sq(const CoefficientVector& psi) {
  double cm = volume_density(psi.dims);
  double sum = 0.0;
  for (Index i = 0; i < psi.coeffs.size(); ++i) {
    auto [a1, a2] = monomial_exponents(psi.dims, psi.degree, i);
    double moment = M_PI / (a1 + 1.0);
    if (psi.dims == 2) moment *= M_PI / (a2 + 1.0);
    sum += std::norm(psi.coeffs[i]) * moment;
  }
  return cm * sum;
}

// ---------------------------------------------------------------------------
// Radial and angular rules
// ---------------------------------------------------------------------------

namespace {

using NodeList = std::vector<std::pair<double, double>>;  // (rho, weight incl. rho drho)

NodeList plain_radial_rule(int n) {
  auto [x, w] = gauss_legendre_on(n, 0.0, 1.0);
  NodeList nodes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) nodes[i] = {x[i], w[i] * x[i]};
  return nodes;
}

// Radial rule for a factor carrying the weight exp(-chi(t + log rho^2)).
// Panels are split where the cutoff argument crosses its breakpoints, so the
// integrand is smooth on every panel; the near-layer panels use the
// substitution rho = exp(u/2).
NodeList weighted_radial_rule(int n, const Cutoff& c, double t) {
  NodeList nodes;
  auto push_rho_panel = [&](double a, double b) {
    if (!(b > a)) return;
    auto [x, w] = gauss_legendre_on(n, a, b);
    for (int i = 0; i < n; ++i) nodes.emplace_back(x[i], w[i] * x[i]);
  };
  auto push_u_panel = [&](double a, double b) {
    if (!(b > a)) return;
    auto [x, w] = gauss_legendre_on(n, a, b);
    for (int i = 0; i < n; ++i)
      nodes.emplace_back(std::exp(0.5 * x[i]), 0.5 * w[i] * std::exp(x[i]));
  };
  if (t <= 0.0) {
    push_rho_panel(0.0, 1.0);  // weight is identically 1 here
    return nodes;
  }
  double rho_star = std::exp(-0.5 * t);
  push_rho_panel(0.0, rho_star);
  if (c.kind == CutoffKind::Sharp) return nodes;  // weight vanishes past the layer
  double u_mid = std::min(0.0, c.width - t);
  push_u_panel(-t, u_mid);
  push_u_panel(u_mid, 0.0);
  return nodes;
}

std::vector<Complex> angular_factors(int n, int max_mode) {
  std::vector<Complex> ang(static_cast<std::size_t>(2 * max_mode + 1));
  double dtheta = kTwoPi / n;
  for (int d = -max_mode; d <= max_mode; ++d) {
    Complex sum = 0.0;
    for (int j = 0; j < n; ++j) {
      double th = dtheta * j;
      sum += Complex(std::cos(d * th), std::sin(d * th));
    }
    ang[static_cast<std::size_t>(d + max_mode)] = sum * dtheta;
  }
  return ang;
}

double weight_value(const Cutoff& c, double t, double r) {
  double arg = t + (r > 0.0 ? std::log(r) : kNegInf);
  double chi = chi_eval(c, arg);
  return chi == kPosInf ? 0.0 : std::exp(-chi);
}

// ---------------------------------------------------------------------------
// Product-weight assembly (PointInDisc, CoordinateLine)
// ---------------------------------------------------------------------------

RealVector radial_moments(const NodeList& nodes, int max_pow,
                          const std::function<double(double)>& factor_weight) {
  RealVector m = RealVector::Zero(max_pow + 1);
  for (const auto& [rho, w] : nodes) {
    double wf = w * factor_weight(rho);
    if (wf == 0.0) continue;
    double p = 1.0;
    for (int a = 0; a <= max_pow; ++a, p *= rho) m[a] += wf * p;
  }
  return m;
}

Matrix assemble_product(const ModelDomain& domain, const SubmanifoldSpec& sub,
                        const Cutoff& cutoff, int degree, double t) {
  const int m = domain.complex_dim();
  const int n = sub.dim();
  const double pref = std::exp((m - n) * t) * volume_density(m);
  const int nrad = domain.quad.radial;
  const int nang = domain.quad.angular;
  auto ang = angular_factors(nang, degree);
  auto weighted = [&](double rho) { return weight_value(cutoff, t, rho * rho); };

  if (sub.kind == SubmanifoldKind::PointInDisc) {
    RealVector mom = radial_moments(weighted_radial_rule(nrad, cutoff, t),
                                    2 * degree, weighted);
    Index k = monomial_count(1, degree);
    Matrix g(k, k);
    for (Index a = 0; a < k; ++a)
      for (Index b = 0; b < k; ++b)
        g(a, b) = pref * ang[static_cast<std::size_t>(a - b + degree)] *
                  mom[static_cast<int>(a + b)];
    return hermitize(g);
  }

  // CoordinateLine: weight rides on the z2 factor only
  RealVector plain = radial_moments(plain_radial_rule(nrad), 2 * degree,
                                    [](double) { return 1.0; });
  RealVector wmom = radial_moments(weighted_radial_rule(nrad, cutoff, t),
                                   2 * degree, weighted);
  Index k = monomial_count(2, degree);
  Matrix g(k, k);
  for (Index ia = 0; ia < k; ++ia) {
    auto [a1, a2] = monomial_exponents(2, degree, ia);
    for (Index ib = 0; ib < k; ++ib) {
      auto [b1, b2] = monomial_exponents(2, degree, ib);
      g(ia, ib) = pref * ang[static_cast<std::size_t>(a1 - b1 + degree)] *
                  plain[a1 + b1] * ang[static_cast<std::size_t>(a2 - b2 + degree)] *
                  wmom[a2 + b2];
    }
  }
  return hermitize(g);
}

// ---------------------------------------------------------------------------
// Coupled-weight assembly (Diagonal, PointInBidisc)
//
// The angular double integral reduces over the difference angle x:
//   Int Int exp(i(d1 th1 + d2 th2)) W(th1 - th2) dth1 dth2
//     = 2 pi [d1 + d2 = 0] * What(d1),   What(d) = Int_0^{2pi} W(x) cos(dx) dx,
// and What is computed with panels split where the cutoff argument crosses
// its breakpoints, so each panel integrand is smooth.
// ---------------------------------------------------------------------------

struct CoupledGeometry {
  SubmanifoldKind kind;
  double r_at(double rho1, double rho2, double cosx) const {
    if (kind == SubmanifoldKind::Diagonal)
      return 0.25 * (rho1 * rho1 + rho2 * rho2 - 2.0 * rho1 * rho2 * cosx);
    return 0.5 * (rho1 * rho1 + rho2 * rho2);
  }
};

void angular_what(const CoupledGeometry& geo, const Cutoff& cutoff, double t,
                  double rho1, double rho2, int nang, int max_d, double* what) {
  std::fill(what, what + max_d + 1, 0.0);
  if (geo.kind == SubmanifoldKind::PointInBidisc) {
    what[0] = kTwoPi * weight_value(cutoff, t, geo.r_at(rho1, rho2, 1.0));
    return;
  }
  // breakpoints where t + log r crosses 0 and the smoothing width
  std::vector<double> breaks = {0.0, M_PI};
  auto add_break = [&](double rq) {
    double denom = 2.0 * rho1 * rho2;
    if (denom <= 0.0) return;
    double c = (rho1 * rho1 + rho2 * rho2 - 4.0 * rq) / denom;
    if (c > -1.0 && c < 1.0) breaks.push_back(std::acos(c));
  };
  if (t > 0.0 || true) {
    add_break(std::exp(-t));
    if (cutoff.kind == CutoffKind::SmoothedHinge) add_break(std::exp(cutoff.width - t));
  }
  std::sort(breaks.begin(), breaks.end());
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    double a = breaks[p], b = breaks[p + 1];
    if (!(b > a + 1e-15)) continue;
    auto [x, w] = gauss_legendre_on(nang, a, b);
    for (int i = 0; i < nang; ++i) {
      double wv = weight_value(cutoff, t, geo.r_at(rho1, rho2, std::cos(x[i])));
      if (wv == 0.0) continue;
      double base = 2.0 * w[i] * wv;  // even integrand: twice the [0, pi] integral
      for (int d = 0; d <= max_d; ++d) what[d] += base * std::cos(d * x[i]);
    }
  }
}

Matrix assemble_coupled(const ModelDomain& domain, const SubmanifoldSpec& sub,
                        const Cutoff& cutoff, int degree, double t) {
  const int m = 2;
  const int n = sub.dim();
  const double pref = std::exp((m - n) * t) * volume_density(m) * kTwoPi;
  const int nrad = domain.quad.radial;
  const int nang = domain.quad.angular;
  const Index k = monomial_count(2, degree);
  NodeList radial = plain_radial_rule(nrad);
  CoupledGeometry geo{sub.kind};

  // precompute exponent tables
  std::vector<int> e1(static_cast<std::size_t>(k)), e2(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    auto [a1, a2] = monomial_exponents(2, degree, i);
    e1[static_cast<std::size_t>(i)] = a1;
    e2[static_cast<std::size_t>(i)] = a2;
  }

  const std::size_t tiles = radial.size();
  auto map_tile = [&](std::size_t ti) {
    Matrix part = Matrix::Zero(k, k);
    const auto [rho1, w1] = radial[ti];
    std::vector<double> what(static_cast<std::size_t>(2 * degree + 1));
    std::vector<double> pow1(static_cast<std::size_t>(2 * degree + 1));
    std::vector<double> pow2(static_cast<std::size_t>(2 * degree + 1));
    double p = 1.0;
    for (int a = 0; a <= 2 * degree; ++a, p *= rho1) pow1[static_cast<std::size_t>(a)] = p;
    for (const auto& [rho2, w2] : radial) {
      angular_what(geo, cutoff, t, rho1, rho2, nang, 2 * degree, what.data());
      double q = 1.0;
      for (int a = 0; a <= 2 * degree; ++a, q *= rho2) pow2[static_cast<std::size_t>(a)] = q;
      double wpair = w1 * w2;
      for (Index ia = 0; ia < k; ++ia) {
        int a1 = e1[static_cast<std::size_t>(ia)], a2 = e2[static_cast<std::size_t>(ia)];
        for (Index ib = 0; ib < k; ++ib) {
          int b1 = e1[static_cast<std::size_t>(ib)], b2 = e2[static_cast<std::size_t>(ib)];
          if (a1 + a2 != b1 + b2) continue;  // rotation invariance
          part(ia, ib) += wpair * pow1[static_cast<std::size_t>(a1 + b1)] *
                          pow2[static_cast<std::size_t>(a2 + b2)] *
                          what[static_cast<std::size_t>(std::abs(a1 - b1))];
        }
      }
    }
    return part;
  };
  Matrix g = parallel_reduce(
      tiles, Matrix(Matrix::Zero(k, k)), map_tile,
      [](const Matrix& a, const Matrix& b) { return Matrix(a + b); });
  return hermitize(pref * g);
}

double product_t_max(int degree) {
  return std::min(60.0, 600.0 / (2.0 * degree + 2.0));
}

double coupled_t_max(const QuadratureSpec& q, int degree) {
  double radial_limit = 2.0 * std::log(static_cast<double>(q.radial) / 3.0);
  return std::min(radial_limit, product_t_max(degree));
}

}  // namespace

// ---------------------------------------------------------------------------
// GramFamily
// ---------------------------------------------------------------------------

struct GramFamily::State {
  ModelDomain domain;
  SubmanifoldSpec sub;
  Cutoff cutoff;
  int degree;
  double t_max;
  std::shared_ptr<ConditionLog> log = std::make_shared<ConditionLog>();
  mutable std::mutex mutex;
  mutable std::map<double, Matrix> cache;
};

GramFamily::GramFamily(ModelDomain domain, SubmanifoldSpec submanifold,
                       Cutoff cutoff, int degree)
    : state_(std::make_shared<State>()) {
  if (degree < 0) throw InputError("GramFamily: degree must be >= 0");
  if (submanifold.ambient_dim() != domain.complex_dim())
    throw InputError("GramFamily: submanifold does not live in this domain");
  int d = submanifold.codim();
  if (cutoff.kind != CutoffKind::Sharp && !(cutoff.slope > d)) {
    std::ostringstream os;
    os << "GramFamily: cutoff slope K=" << cutoff.slope
       << " must exceed the codimension " << d
       << "; the weighted mass diverges otherwise";
    throw DivergenceError(os.str());
  }
  state_->domain = domain;
  state_->sub = submanifold;
  state_->cutoff = cutoff;
  state_->degree = degree;
  bool coupled = submanifold.kind == SubmanifoldKind::Diagonal ||
                 submanifold.kind == SubmanifoldKind::PointInBidisc;
  state_->t_max = coupled ? coupled_t_max(domain.quad, degree) : product_t_max(degree);
}

const ModelDomain& GramFamily::domain() const { return state_->domain; }
const SubmanifoldSpec& GramFamily::submanifold() const { return state_->sub; }
const Cutoff& GramFamily::cutoff() const { return state_->cutoff; }
int GramFamily::degree() const { return state_->degree; }
int GramFamily::dims() const { return state_->domain.complex_dim(); }
Index GramFamily::basis_size() const {
  return monomial_count(dims(), state_->degree);
}
double GramFamily::t_max() const { return state_->t_max; }
std::shared_ptr<ConditionLog> GramFamily::log() const { return state_->log; }

const Matrix& GramFamily::gram(double t) const {
  if (!std::isfinite(t)) throw InputError("gram: t must be finite");
  if (t > state_->t_max) {
    std::ostringstream os;
    os << "gram: t=" << t << " exceeds the resolved range t_max=" << state_->t_max
       << " for " << state_->domain.quad.radial << " radial nodes at degree "
       << state_->degree;
    throw ResolutionError(os.str(), state_->t_max);
  }
  std::lock_guard<std::mutex> lock(state_->mutex);
  auto it = state_->cache.find(t);
  if (it != state_->cache.end()) return it->second;
  bool coupled = state_->sub.kind == SubmanifoldKind::Diagonal ||
                 state_->sub.kind == SubmanifoldKind::PointInBidisc;
  Matrix g = coupled
                 ? assemble_coupled(state_->domain, state_->sub, state_->cutoff,
                                    state_->degree, t)
                 : assemble_product(state_->domain, state_->sub, state_->cutoff,
                                    state_->degree, t);
  Eigen::LDLT<Matrix> ldlt(g);
  bool ok = ldlt.info() == Eigen::Success;
  if (ok) {
    auto dd = ldlt.vectorD();
    for (Index i = 0; i < dd.size(); ++i) ok = ok && dd[i].real() > 0.0;
  }
  if (!ok)
    throw ConditioningError("gram: assembled matrix lost positive definiteness");
  return state_->cache.emplace(t, std::move(g)).first->second;
}

HermitianMetricFamily GramFamily::metric_family() const {
  auto state = state_;
  GramFamily self = *this;
  HermitianMetricFamily fam(
      basis_size(), [self](Complex s) { return self.gram(s.real()); }, true);
  fam.adopt_log(state->log);
  return fam;
}

// ---------------------------------------------------------------------------
// Restriction, quotient, extension
// ---------------------------------------------------------------------------

Index y_basis_size(SubmanifoldKind kind, int degree) {
  switch (kind) {
    case SubmanifoldKind::PointInDisc:
    case SubmanifoldKind::PointInBidisc:
      return 1;
    case SubmanifoldKind::CoordinateLine:
      return degree + 1;
    case SubmanifoldKind::Diagonal:
      return 2 * degree + 1;
  }
  return 0;
}

RealMatrix restriction_constraints(SubmanifoldKind kind, int degree) {
  int dims = (kind == SubmanifoldKind::PointInDisc) ? 1 : 2;
  Index k = monomial_count(dims, degree);
  Index rows = y_basis_size(kind, degree);
  RealMatrix r = RealMatrix::Zero(rows, k);
  for (Index i = 0; i < k; ++i) {
    auto [a1, a2] = monomial_exponents(dims, degree, i);
    switch (kind) {
      case SubmanifoldKind::PointInDisc:
      case SubmanifoldKind::PointInBidisc:
        if (a1 == 0 && a2 == 0) r(0, i) = 1.0;
        break;
      case SubmanifoldKind::CoordinateLine:
        if (a2 == 0) r(a1, i) = 1.0;
        break;
      case SubmanifoldKind::Diagonal:
        r(a1 + a2, i) = 1.0;
        break;
    }
  }
  return r;
}

Vector pad_boundary_data(const GramFamily& fam, const Vector& f) {
  Index rows = y_basis_size(fam.submanifold().kind, fam.degree());
  if (f.size() > rows) {
    std::ostringstream os;
    os << "boundary data has " << f.size() << " coefficients but degree "
       << fam.degree() << " only supports " << rows
       << "; raise the truncation degree";
    throw FeasibilityError(os.str());
  }
  if (f.size() == 0) throw InputError("boundary data is empty");
  Vector padded = Vector::Zero(rows);
  padded.head(f.size()) = f;
  return padded;
}

namespace {

Eigen::LDLT<Matrix> gram_ldlt(const GramFamily& fam, double t) {
  Matrix g = fam.gram(t);
  Eigen::LDLT<Matrix> ldlt(g);
  bool ok = ldlt.info() == Eigen::Success;
  if (ok) {
    auto d = ldlt.vectorD();
    double dmax = 0.0;
    for (Index i = 0; i < d.size(); ++i) dmax = std::max(dmax, d[i].real());
    for (Index i = 0; i < d.size(); ++i) ok = ok && d[i].real() > 1e-15 * dmax;
  }
  if (!ok) {
    double jitter = 1e-12 * std::abs(g.trace().real());
    fam.log()->record_jitter(jitter);
    g += jitter * Matrix::Identity(g.rows(), g.cols());
    ldlt.compute(g);
    if (ldlt.info() != Eigen::Success)
      throw ConditioningError("gram solve: matrix stays singular after jitter");
  }
  return ldlt;
}

}  // namespace

QuotientView::QuotientView(const GramFamily& fam)
    : fam_(fam),
      restriction_(restriction_constraints(fam.submanifold().kind, fam.degree())
                       .cast<Complex>()),
      kernel_(Eigen::FullPivLU<Matrix>(restriction_).kernel()),
      quotient_(quotient_metric(fam.metric_family(), kernel_)) {
  std::vector<Index> comp = quotient_complement_indices(kernel_);
  comp_count_ = static_cast<Index>(comp.size());
  Index k = restriction_.cols();
  basis_ = Matrix::Zero(k, k);
  for (Index c = 0; c < comp_count_; ++c)
    basis_(comp[static_cast<std::size_t>(c)], c) = 1.0;
  basis_.rightCols(k - comp_count_) = kernel_;
}

Vector QuotientView::class_coordinates(const Vector& f) const {
  Vector fp = pad_boundary_data(fam_, f);
  // a representative of the class of f, independent of G
  Vector rep = Eigen::CompleteOrthogonalDecomposition<Matrix>(restriction_).solve(fp);
  if ((restriction_ * rep - fp).norm() > 1e-9 * (1.0 + fp.norm()))
    throw FeasibilityError("quotient: boundary data is not attainable at this degree");
  Vector xy = Eigen::PartialPivLU<Matrix>(basis_).solve(rep);
  return xy.head(comp_count_);
}

double QuotientView::norm(double t, const Vector& f) const {
  Vector x = class_coordinates(f);
  Matrix s = quotient_.matrix(Complex(t, 0.0));
  return std::sqrt(std::max(0.0, std::real(x.dot(s * x))));
}

double quotient_norm(const GramFamily& fam, double t, const Vector& f) {
  return QuotientView(fam).norm(t, f);
}

CoefficientVector minimal_extension(const GramFamily& fam, double t, const Vector& f) {
  Vector fp = pad_boundary_data(fam, f);
  Matrix r = restriction_constraints(fam.submanifold().kind, fam.degree())
                 .cast<Complex>();
  auto ldlt = gram_ldlt(fam, t);
  Matrix x = ldlt.solve(r.adjoint());           // k x rows
  Matrix s = hermitize(r * x);                  // rows x rows
  Eigen::LDLT<Matrix> sl(s);
  if (sl.info() != Eigen::Success)
    throw ConditioningError("minimal_extension: constraint normal matrix is singular");
  Vector psi = x * sl.solve(fp);
  return CoefficientVector{fam.dims(), fam.degree(), psi};
}

double dual_functional_norm(const GramFamily& fam, double t, const Vector& l) {
  Vector lp = pad_boundary_data(fam, l);
  Matrix r = restriction_constraints(fam.submanifold().kind, fam.degree())
                 .cast<Complex>();
  Vector big = r.transpose() * lp;  // row functional L = l^T R, stored as column
  auto ldlt = gram_ldlt(fam, t);
  Vector y = ldlt.solve(big.conjugate());
  double val = std::real((big.transpose() * y)(0));
  return std::sqrt(std::max(0.0, val));
}

// ---------------------------------------------------------------------------
// Boundary norms
// ---------------------------------------------------------------------------

CoefficientVector canonical_extension(const SubmanifoldSpec& sub, int dims,
                                      int degree, const Vector& f) {
  Index k = monomial_count(dims, degree);
  Vector c = Vector::Zero(k);
  switch (sub.kind) {
    case SubmanifoldKind::PointInDisc:
    case SubmanifoldKind::PointInBidisc:
      if (f.size() != 1) throw InputError("point data must be a single value");
      c[0] = f[0];
      break;
    case SubmanifoldKind::CoordinateLine:
      if (f.size() > degree + 1)
        throw FeasibilityError("canonical_extension: data degree exceeds truncation");
      for (Index j = 0; j < f.size(); ++j)
        c[monomial_index(2, degree, static_cast<int>(j), 0)] = f[j];
      break;
    case SubmanifoldKind::Diagonal: {
      // w^j with w = (z1 + z2)/2 expands binomially across the factors
      for (Index j = 0; j < f.size(); ++j) {
        if (j > degree)
          throw FeasibilityError("canonical_extension: data degree exceeds truncation");
        double scale = std::pow(0.5, static_cast<double>(j));
        double binom = 1.0;
        for (Index i = 0; i <= j; ++i) {
          c[monomial_index(2, degree, static_cast<int>(i), static_cast<int>(j - i))] +=
              f[j] * scale * binom;
          binom *= static_cast<double>(j - i) / static_cast<double>(i + 1);
        }
      }
      break;
    }
  }
  return CoefficientVector{dims, degree, c};
}

namespace {

double disc_l2_quadrature(const QuadratureSpec& q, const CoefficientVector& f) {
  // Int_D |f|^2 dA by Gauss-Legendre x trapezoid
  NodeList radial = plain_radial_rule(q.radial);
  double dtheta = kTwoPi / q.angular;
  double sum = 0.0;
  for (const auto& [rho, w] : radial) {
    double ring = 0.0;
    for (int j = 0; j < q.angular; ++j) {
      double th = dtheta * j;
      ring += std::norm(f.eval(Complex(rho * std::cos(th), rho * std::sin(th))));
    }
    sum += w * ring * dtheta;
  }
  return sum;
}

// admissible angular measure for the diagonal tube cross-section
double tube_angle_measure(double a, double rho) {
  if (a <= 0.0) return kTwoPi;
  double c = (1.0 - a * a - rho * rho) / (2.0 * a * rho);
  if (c >= 1.0) return kTwoPi;
  if (c <= 0.0) return 0.0;
  return std::max(0.0, 2.0 * (M_PI - 2.0 * std::acos(c)));
}

double diagonal_sharp_integral(const QuadratureSpec& q, const CoefficientVector& fw,
                               double eps) {
  // I(eps) = 16 eps^{-2} Int_{|w|<1} |f(w)|^2 Area_v(|w|, eps) dA_w, where
  // Area_v is the v-disc area clipped by both bidisc factors.
  const int nr = q.radial, na = q.angular;
  double dtheta = kTwoPi / na;
  auto f_ring = [&](double a) {
    double ring = 0.0;
    for (int j = 0; j < na; ++j) {
      double th = dtheta * j;
      ring += std::norm(fw.eval(Complex(a * std::cos(th), a * std::sin(th))));
    }
    return ring * dtheta;
  };
  // full-area part: |w| <= 1 - eps has the whole pi eps^2 cross-section
  double inner = 0.0;
  {
    auto [x, w] = gauss_legendre_on(nr, 0.0, std::max(0.0, 1.0 - eps));
    for (int i = 0; i < nr; ++i) inner += w[i] * x[i] * f_ring(x[i]) * M_PI;
  }
  // boundary ring: clipped cross-section, v-integral split at rho = 1 - a
  double ring = 0.0;
  {
    auto [xa, wa] = gauss_legendre_on(nr, std::max(0.0, 1.0 - eps), 1.0);
    for (int i = 0; i < nr; ++i) {
      double a = xa[i];
      double split = std::clamp(1.0 - a, 0.0, eps);
      double area = 0.5 * kTwoPi * split * split;  // full-angle part
      auto [xr, wr] = gauss_legendre_on(nr, split, eps);
      for (int jr = 0; jr < nr; ++jr)
        area += wr[jr] * xr[jr] * tube_angle_measure(a, xr[jr]);
      ring += wa[i] * a * f_ring(a) * area;
    }
  }
  return 16.0 * (inner + ring / (eps * eps));
}

double richardson_limit(const std::vector<double>& eps,
                        const std::vector<double>& vals) {
  // least squares for I(eps) = A + B eps + C eps^2; returns A
  Eigen::MatrixXd m(static_cast<Index>(eps.size()), 3);
  Eigen::VectorXd b(static_cast<Index>(eps.size()));
  for (std::size_t i = 0; i < eps.size(); ++i) {
    m(static_cast<Index>(i), 0) = 1.0;
    m(static_cast<Index>(i), 1) = eps[i];
    m(static_cast<Index>(i), 2) = eps[i] * eps[i];
    b(static_cast<Index>(i)) = vals[i];
  }
  Eigen::VectorXd sol = m.colPivHouseholderQr().solve(b);
  return sol[0];
}

}  // namespace

double boundary_norm_sq(const ModelDomain& domain, const SubmanifoldSpec& sub,
                        const Vector& f, const BoundaryOptions& opts) {
  if (sub.ambient_dim() != domain.complex_dim())
    throw InputError("boundary_norm_sq: submanifold does not live in this domain");
  if (f.size() == 0) throw InputError("boundary_norm_sq: empty data");

  switch (opts.method) {
    case BoundaryMethod::ClosedForm:
      switch (sub.kind) {
        case SubmanifoldKind::PointInDisc:
          // sigma = pi (unit ball of R^2) times transverse density 2 |f|^2
          return kTwoPi * std::norm(f[0]);
        case SubmanifoldKind::CoordinateLine: {
          double sum = 0.0;
          for (Index j = 0; j < f.size(); ++j)
            sum += std::norm(f[j]) / (static_cast<double>(j) + 1.0);
          return 4.0 * M_PI * M_PI * sum;
        }
        case SubmanifoldKind::PointInBidisc:
          // sigma = pi^2/2, density 4 |f|^2, and r's 1/2 scaling doubles twice
          return 8.0 * M_PI * M_PI * std::norm(f[0]);
        case SubmanifoldKind::Diagonal:
          throw InputError(
              "boundary_norm_sq: no closed form for the diagonal; use sharpLimit "
              "or softLimit");
      }
      break;

    case BoundaryMethod::SharpLimit: {
      for (double e : opts.eps_schedule) {
        double floor = std::max(1e-6, 0.5 / domain.quad.radial);
        if (e < floor)
          throw ResolutionError("boundary_norm_sq: epsilon below quadrature resolution",
                                floor);
        if (!(e < 0.9)) throw InputError("boundary_norm_sq: epsilon schedule too coarse");
      }
      std::vector<double> vals;
      switch (sub.kind) {
        case SubmanifoldKind::PointInDisc:
          for (std::size_t i = 0; i < opts.eps_schedule.size(); ++i)
            vals.push_back(kTwoPi * std::norm(f[0]));
          break;
        case SubmanifoldKind::PointInBidisc:
          for (std::size_t i = 0; i < opts.eps_schedule.size(); ++i)
            vals.push_back(8.0 * M_PI * M_PI * std::norm(f[0]));
          break;
        case SubmanifoldKind::CoordinateLine: {
          CoefficientVector fy{1, static_cast<int>(f.size()) - 1, f};
          double l2 = disc_l2_quadrature(domain.quad, fy);
          for (std::size_t i = 0; i < opts.eps_schedule.size(); ++i)
            vals.push_back(4.0 * M_PI * l2);
          break;
        }
        case SubmanifoldKind::Diagonal: {
          CoefficientVector fy{1, static_cast<int>(f.size()) - 1, f};
          for (double e : opts.eps_schedule)
            vals.push_back(diagonal_sharp_integral(domain.quad, fy, e));
          break;
        }
      }
      return richardson_limit(opts.eps_schedule, vals);
    }

    case BoundaryMethod::SoftLimit: {
      int deg = std::max<int>(2, static_cast<int>(f.size()) - 1);
      GramFamily fam(domain, sub, opts.cutoff, deg);
      CoefficientVector psi =
          canonical_extension(sub, domain.complex_dim(), deg, f);
      double t_top = std::min(opts.soft_t_top, 0.9 * fam.t_max());
      double h = 1.0;
      double e0 = std::real(psi.coeffs.dot(fam.gram(t_top - 2 * h) * psi.coeffs));
      double e1 = std::real(psi.coeffs.dot(fam.gram(t_top - h) * psi.coeffs));
      double e2 = std::real(psi.coeffs.dot(fam.gram(t_top) * psi.coeffs));
      double d1 = e1 - e0, d2 = e2 - e1;
      double limit = (std::abs(d2 - d1) > 1e-14 * (std::abs(e2) + 1.0))
                         ? e2 - d2 * d2 / (d2 - d1)
                         : e2;
      return limit / mass_factor(opts.cutoff, sub.codim());
    }
  }
  throw InputError("boundary_norm_sq: unknown method");
}

}  // namespace extrap
