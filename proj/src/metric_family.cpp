#include "extrap/metric_family.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace extrap {

namespace {

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

void check_hermitian(const Matrix& m, const char* who) {
  double scale = m.norm() + 1.0;
  if ((m - m.adjoint()).norm() > 1e-9 * scale) {
    std::ostringstream os;
    os << who << ": evaluator output is not Hermitian (defect "
       << (m - m.adjoint()).norm() / scale << ")";
    throw InputError(os.str());
  }
}

Eigen::LDLT<Matrix> pd_factorize(const Matrix& h, const char* who) {
  Eigen::LDLT<Matrix> ldlt(h);
  bool ok = ldlt.info() == Eigen::Success;
  if (ok) {
    auto d = ldlt.vectorD();
    for (Index i = 0; i < d.size(); ++i) ok = ok && d[i].real() > 0.0;
  }
  if (!ok) {
    std::ostringstream os;
    os << who << ": matrix is not positive definite";
    throw PositivityError(os.str());
  }
  return ldlt;
}

}  // namespace

HermitianMetricFamily::HermitianMetricFamily(Index rank, Evaluator evaluator,
                                             bool re_invariant)
    : rank_(rank), evaluator_(std::move(evaluator)), re_invariant_(re_invariant) {
  if (rank_ < 1) throw InputError("HermitianMetricFamily: rank must be >= 1");
  if (!evaluator_) throw InputError("HermitianMetricFamily: missing evaluator");
}

Matrix HermitianMetricFamily::matrix(Complex s) const {
  Matrix h = evaluator_(s);
  if (h.rows() != rank_ || h.cols() != rank_)
    throw InputError("HermitianMetricFamily: evaluator rank mismatch");
  check_hermitian(h, "HermitianMetricFamily");
  h = hermitize(h);
  pd_factorize(h, "HermitianMetricFamily");
  return h;
}

double HermitianMetricFamily::norm_sq(Complex s, const Vector& v) const {
  Matrix h = matrix(s);
  return std::real(v.dot(h * v));  // Eigen's dot conjugates the left argument
}

double HermitianMetricFamily::norm(Complex s, const Vector& v) const {
  return std::sqrt(std::max(0.0, norm_sq(s, v)));
}

void HermitianMetricFamily::verify_re_invariance(std::span<const Complex> points,
                                                 double tol) const {
  if (!re_invariant_) return;
  for (Complex s : points) {
    Matrix a = matrix(s), b = matrix(Complex(s.real(), 0.0));
    if ((a - b).norm() > tol * (a.norm() + 1.0))
      throw InputError("re-invariance violated at a spot-check point");
  }
}

Matrix chern_curvature(const HermitianMetricFamily& fam, Complex s, double step) {
  if (!(step > 0.0)) throw InputError("chern_curvature: step must be > 0");
  if (fam.min_step() > 0.0 && step < fam.min_step()) {
    std::ostringstream os;
    os << "chern_curvature: step " << step
       << " is below the sampled family's resolution " << fam.min_step();
    throw ResolutionError(os.str(), fam.min_step());
  }
  const Complex dx(step, 0.0), dy(0.0, step);
  Matrix h0 = fam.matrix(s);
  Matrix hpx = fam.matrix(s + dx), hmx = fam.matrix(s - dx);
  Matrix hpy = fam.matrix(s + dy), hmy = fam.matrix(s - dy);

  Matrix d_x = (hpx - hmx) / (2.0 * step);
  Matrix d_y = (hpy - hmy) / (2.0 * step);
  Matrix ds = 0.5 * (d_x - Complex(0, 1) * d_y);
  Matrix dsbar = 0.5 * (d_x + Complex(0, 1) * d_y);
  Matrix lap = (hpx + hmx + hpy + hmy - 4.0 * h0) / (step * step);
  Matrix ds_dsbar = 0.25 * lap;

  auto ldlt = pd_factorize(h0, "chern_curvature");
  return ldlt.solve(ds_dsbar) - ldlt.solve(dsbar) * ldlt.solve(ds);
}

double kobayashi_exact(const HermitianMetricFamily& fam, Complex s,
                       const Vector& v, double step) {
  if (v.size() != fam.rank()) throw InputError("kobayashi_exact: vector size mismatch");
  if (v.norm() == 0.0) throw InputError("kobayashi_exact: v must be nonzero");
  Matrix h = fam.matrix(s);
  Matrix theta = chern_curvature(fam, s, step);
  double num = -std::real(v.dot(h * (theta * v)));
  double den = 2.0 * std::real(v.dot(h * v));
  return num / den;
}

HermitianMetricFamily dual_metric(const HermitianMetricFamily& fam) {
  Index k = fam.rank();
  auto log = std::make_shared<ConditionLog>();
  auto parent = fam;  // shared-state copy keeps the closure self-contained
  auto eval = [parent, log, k](Complex s) -> Matrix {
    Matrix h = parent.matrix(s);
    Eigen::LDLT<Matrix> ldlt(h);
    Matrix inv = ldlt.solve(Matrix::Identity(k, k));
    double rcond_proxy = 1.0 / std::max(1.0, h.cwiseAbs().sum() * inv.cwiseAbs().sum() / (double)(k * k));
    if (h.cwiseAbs().maxCoeff() * inv.cwiseAbs().maxCoeff() > 1e12) {
      std::ostringstream os;
      os << "dual_metric: near-singular primal metric at s = (" << s.real()
         << ", " << s.imag() << "), rcond proxy " << rcond_proxy;
      log->warn(os.str());
    }
    return inv.transpose();
  };
  HermitianMetricFamily dual(k, eval, fam.re_invariant());
  dual.set_min_step(fam.min_step());
  dual.adopt_log(log);
  return dual;
}

std::vector<Index> quotient_complement_indices(const Matrix& ideal_basis) {
  Index k = ideal_basis.rows(), j = ideal_basis.cols();
  if (j < 1 || j >= k)
    throw RankError("quotient: ideal must be a proper nonzero subspace");
  Eigen::ColPivHouseholderQR<Matrix> qr(ideal_basis);
  if (qr.rank() < j) throw RankError("quotient: ideal basis is linearly dependent");
  // orthogonal projector onto the standard-inner-product complement of the
  // ideal; keep the coordinate axes it loads most
  Matrix q = qr.householderQ() * Matrix::Identity(k, j);
  Matrix proj = Matrix::Identity(k, k) - q * q.adjoint();
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return proj(a, a).real() > proj(b, b).real();
  });
  order.resize(static_cast<std::size_t>(k - j));
  std::sort(order.begin(), order.end());
  return order;
}

HermitianMetricFamily quotient_metric(const HermitianMetricFamily& fam,
                                      const Matrix& ideal_basis) {
  Index k = fam.rank();
  if (ideal_basis.rows() != k) throw InputError("quotient: ideal basis row mismatch");
  std::vector<Index> comp = quotient_complement_indices(ideal_basis);
  Index q = static_cast<Index>(comp.size());
  Matrix picker = Matrix::Zero(k, q);
  for (Index c = 0; c < q; ++c) picker(comp[static_cast<std::size_t>(c)], c) = 1.0;

  auto parent = fam;
  Matrix basis = ideal_basis;
  auto log = parent.log();
  auto eval = [parent, basis, picker, log](Complex s) -> Matrix {
    Matrix h = parent.matrix(s);
    Matrix hb = h * basis;
    Matrix bhb = hermitize(basis.adjoint() * hb);
    Eigen::LDLT<Matrix> ldlt(bhb);
    bool ok = ldlt.info() == Eigen::Success;
    if (ok) {
      auto d = ldlt.vectorD();
      double dmax = 0.0;
      for (Index i = 0; i < d.size(); ++i) dmax = std::max(dmax, d[i].real());
      for (Index i = 0; i < d.size(); ++i) ok = ok && d[i].real() > 1e-14 * dmax;
    }
    if (!ok) {
      double jitter = 1e-12 * std::abs(bhb.trace().real());
      bhb += jitter * Matrix::Identity(bhb.rows(), bhb.cols());
      log->record_jitter(jitter);
      ldlt.compute(bhb);
      if (ldlt.info() != Eigen::Success)
        throw ConditioningError("quotient_metric: Gram stays singular after jitter");
    }
    Matrix hc = h * picker;
    Matrix cross = basis.adjoint() * hc;  // j x q
    Matrix schur = picker.adjoint() * hc - cross.adjoint() * ldlt.solve(cross);
    return hermitize(schur);
  };
  HermitianMetricFamily quot(q, eval, fam.re_invariant());
  quot.set_min_step(fam.min_step());
  quot.adopt_log(log);
  return quot;
}

OperatorFamily::OperatorFamily(std::vector<Matrix> coeffs,
                               HermitianMetricFamily domain,
                               HermitianMetricFamily codomain)
    : coeffs_(std::move(coeffs)), domain_(std::move(domain)), codomain_(std::move(codomain)) {
  if (coeffs_.empty()) throw InputError("OperatorFamily: no coefficients");
  for (const auto& c : coeffs_)
    if (c.rows() != codomain_.rank() || c.cols() != domain_.rank())
      throw InputError("OperatorFamily: coefficient dimensions do not match the metric ranks");
}

Matrix OperatorFamily::at(Complex s) const {
  Matrix a = coeffs_.back();
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it)
    a = a * s + *it;
  return a;
}

double operator_norm(const OperatorFamily& op, Complex s) {
  Matrix a = op.at(s);
  Matrix hf = op.codomain().matrix(s);
  Matrix he = op.domain().matrix(s);
  Matrix m = hermitize(a.adjoint() * hf * a);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(m, he);
  if (solver.info() != Eigen::Success)
    throw ConditioningError("operator_norm: generalized eigensolve failed");
  double top = solver.eigenvalues().maxCoeff();
  return std::sqrt(std::max(0.0, top));
}

Verdict decreases_curvature_verdict(const OperatorFamily& op,
                                    std::span<const std::pair<Complex, Vector>> probes,
                                    double step, double tol) {
  double worst = -kPosInf;
  std::optional<Witness> witness;
  int skipped = 0, tested = 0;
  for (const auto& [s, v] : probes) {
    Vector av = op.at(s) * v;
    double av_norm = op.codomain().norm(s, av);
    double v_scale = std::max(1e-300, v.norm());
    if (av_norm <= 1e-12 * v_scale) {
      ++skipped;  // the inequality is only claimed for A v != 0
      continue;
    }
    double k_target = kobayashi_exact(op.codomain(), s, av, step);
    double k_source = kobayashi_exact(op.domain(), s, v, step);
    double violation = k_target - k_source;
    ++tested;
    if (violation > worst) {
      worst = violation;
      witness = Witness{"s", {s.real(), s.imag()}};
    }
  }
  if (tested == 0) throw InputError("decreases_curvature_verdict: no usable probes");
  std::string note;
  if (skipped > 0) {
    std::ostringstream os;
    os << skipped << " probes skipped (A v = 0)";
    note = os.str();
  }
  return Verdict::of(std::max(0.0, worst), tol, witness, note);
}

Vector PolynomialSection::at(Complex s) const {
  if (coeffs.empty()) throw InputError("PolynomialSection: empty");
  Vector v = coeffs.back();
  for (auto it = coeffs.rbegin() + 1; it != coeffs.rend(); ++it)
    v = v * s + *it;
  return v;
}

void SectionDictionary::validate(double tol) const {
  if (entries.empty()) throw InputError("SectionDictionary: empty dictionary");
  for (const auto& e : entries) {
    Vector v = e.at(base);
    if ((v - value).norm() > tol * (value.norm() + 1.0))
      throw InputError("SectionDictionary: an entry misses the prescribed value at the base point");
  }
}

NormFamily norm_family_of(const HermitianMetricFamily& fam) {
  auto parent = fam;
  return NormFamily{fam.rank(),
                    [parent](Complex s, const Vector& v) { return parent.norm(s, v); }};
}

double kobayashi_dictionary(const NormFamily& norms, const SectionDictionary& dict,
                            const RadiusSchedule& schedule) {
  dict.validate();
  double best = kPosInf;
  for (const auto& entry : dict.entries) {
    auto logp = [&](Complex s) {
      double p = norms.p(s, entry.at(s));
      return p <= 0.0 ? kNegInf : std::log(p);
    };
    best = std::min(best, lambda_estimate(logp, dict.base, schedule));
  }
  return -best;
}

double kobayashi_dictionary(const HermitianMetricFamily& fam,
                            const SectionDictionary& dict,
                            const RadiusSchedule& schedule) {
  return kobayashi_dictionary(norm_family_of(fam), dict, schedule);
}

double dual_norm_sampled(const NormFamily& norms, Complex s, const Vector& l,
                         int samples) {
  if (norms.rank > 3)
    throw InputError("dual_norm_sampled: supported for rank <= 3 only");
  if (l.size() != norms.rank) throw InputError("dual_norm_sampled: size mismatch");
  std::mt19937 rng(0x5u);  // fixed seed: the sample is part of the definition
  std::normal_distribution<double> gauss(0.0, 1.0);
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    Vector v(norms.rank);
    for (Index j = 0; j < norms.rank; ++j) v[j] = Complex(gauss(rng), gauss(rng));
    double nv = v.norm();
    if (nv == 0.0) continue;
    v /= nv;
    double p = norms.p(s, v);
    if (!(p > 0.0)) continue;
    best = std::max(best, std::abs((l.transpose() * v)(0)) / p);
  }
  return best;
}

HermitianMetricFamily metric_catalog(const std::string& name) {
  auto scalar = [](std::function<double(Complex)> phi, bool re_inv) {
    return HermitianMetricFamily(
        1,
        [phi](Complex s) {
          Matrix h(1, 1);
          h(0, 0) = std::exp(-phi(s));
          return h;
        },
        re_inv);
  };
  if (name == "flat1" || name == "flat2" || name == "flat3") {
    Index k = name.back() - '0';
    return HermitianMetricFamily(
        k, [k](Complex) { return Matrix::Identity(k, k).eval(); }, true);
  }
  if (name == "gauss1")
    return scalar([](Complex s) { return std::norm(s); }, false);
  if (name == "gaussre1")
    return scalar([](Complex s) { return s.real() * s.real(); }, true);
  if (name == "expgrow1")
    return scalar([](Complex s) { return -std::norm(s); }, false);
  if (name == "expgrow2")
    return HermitianMetricFamily(
        2,
        [](Complex s) {
          return (std::exp(s.real() * s.real()) * Matrix::Identity(2, 2)).eval();
        },
        true);
  if (name == "gaussdiag2")
    return HermitianMetricFamily(2, [](Complex s) {
      Matrix h = Matrix::Zero(2, 2);
      h(0, 0) = std::exp(-std::norm(s));
      h(1, 1) = std::exp(-2.0 * std::norm(s));
      return h;
    });
  if (name == "hyb2")
    return HermitianMetricFamily(2, [](Complex s) {
      Matrix h = Matrix::Zero(2, 2);
      h(0, 0) = std::exp(-std::norm(s));
      h(1, 1) = 1.0;
      return h;
    });
  throw InputError("unknown catalog metric family '" + name + "'");
}

std::vector<std::string> metric_catalog_names() {
  return {"flat1", "flat2", "flat3", "gauss1", "gaussre1", "gaussdiag2",
          "hyb2", "expgrow1", "expgrow2"};
}

}  // namespace extrap
