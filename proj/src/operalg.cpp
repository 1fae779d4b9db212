#include "dflow/operalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dflow/quadrature.hpp"

namespace dflow {

namespace {

constexpr double kRankTol = 1e-8;

double hermitian_error(const Matrix& G) {
  return (G - G.adjoint()).cwiseAbs().maxCoeff();
}

// G^{-1/2} and G^{1/2} of a Hermitian positive definite matrix.
std::pair<Matrix, Matrix> sqrt_pair(const Matrix& G) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  const Eigen::VectorXd ev = es.eigenvalues();
  const Matrix& Q = es.eigenvectors();
  Eigen::VectorXd s = ev.cwiseSqrt();
  Matrix half = Q * s.cast<cplx>().asDiagonal() * Q.adjoint();
  Matrix inv_half = Q * s.cwiseInverse().cast<cplx>().asDiagonal() * Q.adjoint();
  return {inv_half, half};
}

double hermitian_norm(const Matrix& H) {
  if (H.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

double one_norm(const Matrix& M) { return M.cwiseAbs().colwise().sum().maxCoeff(); }

Matrix checked_inverse(const Matrix& M, const char* what) {
  Eigen::FullPivLU<Matrix> lu(M);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw PreconditionError(what);
  return lu.inverse();
}

}  // namespace

MatrixOperator::MatrixOperator(Matrix t) : op(std::move(t)) {
  if (op.rows() != op.cols()) throw PreconditionError("MatrixOperator: matrix must be square");
  gram = Matrix::Identity(op.rows(), op.cols());
}

MatrixOperator::MatrixOperator(Matrix t, Matrix g) : op(std::move(t)), gram(std::move(g)) {
  if (op.rows() != op.cols()) throw PreconditionError("MatrixOperator: matrix must be square");
  if (gram.rows() != op.rows() || gram.cols() != op.cols())
    throw PreconditionError("MatrixOperator: inner-product matrix has the wrong size");
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if (hermitian_error(gram) > 1e-12 * scale) throw PreconditionError("MatrixOperator: inner product not Hermitian");
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw PreconditionError("MatrixOperator: inner product not positive definite");
}

Matrix MatrixOperator::adjoint() const { return gram.llt().solve(op.adjoint() * gram); }

double MatrixOperator::norm() const {
  const auto [inv_half, half] = sqrt_pair(gram);
  return spectral_norm(half * op * inv_half);
}

GramModel build_gram(const CircleMeasure& mu, int N, const DiscQuadrature& q) {
  if (N < 2) throw PreconditionError("build_gram: degree must be >= 2");
  const auto nodes = energy_nodes(mu, q, {}, 1);
  const Eigen::Index d = N + 1;
  Matrix V = Matrix::Zero(static_cast<Eigen::Index>(nodes.size()), d);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double sw = std::sqrt(nodes[k].w);
    cplx p = 1.0;  // z^{n-1}
    for (Eigen::Index n = 1; n < d; ++n) {
      V(static_cast<Eigen::Index>(k), n) = static_cast<double>(n) * p * sw;
      p *= nodes[k].z;
    }
  }
  const Matrix E = V.adjoint() * V;
  const Matrix Eb = gram_energy_boundary(mu, N);

  GramModel gm;
  gm.measure = mu;
  gm.degree = N;
  gm.gram = Matrix::Identity(d, d) + 0.5 * (E + E.adjoint());
  gm.shift = Matrix::Zero(d, d);
  for (Eigen::Index n = 0; n + 1 < d; ++n) gm.shift(n + 1, n) = 1.0;
  gm.cross_check = (E - Eb).cwiseAbs().maxCoeff();
  return gm;
}

Matrix gram_energy_boundary(const CircleMeasure& mu, int N) {
  const Eigen::Index d = N + 1;
  const int n_bnd = std::max(1024, 8 * static_cast<int>(d));
  Matrix E = Matrix::Zero(d, d);
  // mass * D_xi(z^n, z^m) by the midpoint rule about xi; (zeta^n - xi^n)/(zeta - xi)
  // is a trigonometric polynomial, so the rule is exact.
  auto add_point = [&](double theta, double mass) {
    if (mass == 0.0) return;
    Matrix B(n_bnd, d);
    const cplx xi = std::polar(1.0, theta);
    for (int j = 0; j < n_bnd; ++j) {
      const double u = (j + 0.5) * kTwoPi / n_bnd;
      const cplx zeta = std::polar(1.0, theta + u);
      const double inv = 1.0 / (2.0 * std::abs(std::sin(0.5 * u)));
      cplx zp = 1.0, xp = 1.0;
      for (Eigen::Index n = 0; n < d; ++n) {
        B(j, n) = (zp - xp) * inv;
        zp *= zeta;
        xp *= xi;
      }
    }
    E += (mass / n_bnd) * (B.adjoint() * B);
  };
  for (const auto& a : mu.atoms()) add_point(a.theta, a.mass);
  if (const auto& dens = mu.density()) {
    for (std::size_t k = 0; k + 1 < dens->grid.size(); ++k) {
      const Rule1D g = gauss_legendre(64, dens->grid[k], dens->grid[k + 1]);
      for (std::size_t i = 0; i < g.size(); ++i) add_point(g.x[i], dens->at(g.x[i]) * g.w[i] / kTwoPi);
    }
  }
  return 0.5 * (E + E.adjoint());
}

Matrix eqnorm_gram(const GramModel& gm) {
  Matrix E = gm.gram - Matrix::Identity(gm.gram.rows(), gm.gram.cols());
  E(0, 0) += 1.0;
  return E;
}

DefectResult two_isometry_defect(const MatrixOperator& T, int leading) {
  const Matrix& G = T.gram;
  const Matrix T2 = T.op * T.op;
  const Matrix D = T2.adjoint() * G * T2 - 2.0 * (T.op.adjoint() * G * T.op) + G;
  const Eigen::Index r = leading > 0 ? std::min<Eigen::Index>(leading, T.dim()) : T.dim();
  const Matrix Dr = D.topLeftCorner(r, r);
  const Matrix Gr = G.topLeftCorner(r, r);
  DefectResult out;
  out.delta = Gr.llt().solve(Dr);
  const auto [inv_half, half] = sqrt_pair(Gr);
  out.norm = hermitian_norm(inv_half * Dr * inv_half);
  return out;
}

double eqnorm_defect_residual(const GramModel& gm) {
  const Matrix G = eqnorm_gram(gm);
  const Matrix& S = gm.shift;
  const Matrix S2 = S * S;
  const Matrix D = S2.adjoint() * G * S2 - 2.0 * (S.adjoint() * G * S) + G;
  const Eigen::Index r = std::max<Eigen::Index>(1, gm.degree - 1);
  Matrix E = D.topLeftCorner(r, r);
  E(0, 0) -= 1.0;
  return hermitian_norm(E);
}

double norm_recursion_residual(const MatrixOperator& T, const Vector& x, int n) {
  if (n < 0) throw PreconditionError("norm_recursion_residual: n must be >= 0");
  Vector y = x;
  for (int k = 0; k < n; ++k) y = T.op * y;
  return std::abs(T.norm_sq(y) - n * T.norm_sq(T.op * x) + (n - 1) * T.norm_sq(x));
}

MatrixOperator cayley_cogenerator(const MatrixOperator& A) {
  const Matrix I = Matrix::Identity(A.dim(), A.dim());
  return A.with((A.op + I) * checked_inverse(A.op - I, "cayley_cogenerator: A - I is singular"));
}

MatrixOperator cayley_generator(const MatrixOperator& V) {
  const Matrix I = Matrix::Identity(V.dim(), V.dim());
  return V.with((V.op + I) * checked_inverse(V.op - I, "cayley_generator: V - I is singular"));
}

Matrix expm(const Matrix& M) {
  const Eigen::Index d = M.rows();
  const Matrix I = Matrix::Identity(d, d);
  const double nrm = one_norm(M);
  if (!std::isfinite(nrm)) throw DomainError("expm: non-finite matrix");
  int s = 0;
  if (nrm > 0.5) s = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  const Matrix X = M / std::ldexp(1.0, s);
  Matrix sum = I;
  Matrix term = I;
  for (int k = 1; k <= 40; ++k) {
    term = term * X / static_cast<double>(k);
    sum += term;
    if (one_norm(term) <= std::numeric_limits<double>::epsilon() * one_norm(sum)) break;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum;
}

MatrixOperator semigroup_at(const MatrixOperator& A, double t) {
  if (!(t >= 0.0)) throw PreconditionError("semigroup_at: requires t >= 0");
  return A.with(expm(t * A.op));
}

double spectral_bound(const MatrixOperator& A) {
  Eigen::ComplexEigenSolver<Matrix> es(A.op, false);
  return es.eigenvalues().real().maxCoeff();
}

AffineFit fit_affine(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size() || t.size() < 2) throw PreconditionError("fit_affine: need >= 2 matching samples");
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
  }
  const double mt = st / n, my = sy / n;
  double stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
  }
  AffineFit f;
  f.slope = stt > 0 ? sty / stt : 0.0;
  f.intercept = my - f.slope * mt;
  for (std::size_t i = 0; i < t.size(); ++i)
    f.residual = std::max(f.residual, std::abs(y[i] - (f.slope * t[i] + f.intercept)));
  return f;
}

SemigroupProbe probe_semigroup(const MatrixOperator& A, const std::vector<Vector>& xs, std::vector<double> times) {
  SemigroupProbe p;
  std::sort(times.begin(), times.end());
  p.times = times;
  std::vector<Matrix> T;
  for (double t : times) T.push_back(expm(t * A.op));
  for (const auto& x : xs) {
    std::vector<double> ns;
    for (const auto& Tt : T) ns.push_back(A.norm_sq(Tt * x));
    p.fits.push_back(fit_affine(p.times, ns));
    p.norms_sq.push_back(std::move(ns));
  }
  p.spectral_bound = spectral_bound(A);
  p.growth_bound = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] <= 0.0) continue;
    p.growth_bound = std::min(p.growth_bound, std::log(A.with(T[k]).norm()) / times[k]);
  }
  return p;
}

Prop2Result prop2_check(const MatrixOperator& A, const std::vector<Vector>& vectors, std::vector<double> times,
                        double tol) {
  Prop2Result r;
  r.report.title = "prop2_check";
  // (i)
  for (double t : times) {
    const auto T = semigroup_at(A, t);
    const double nt = T.norm();
    r.residual[0] = std::max(r.residual[0], two_isometry_defect(T).norm / std::max(1.0, std::pow(nt, 4)));
  }
  // (ii)
  const auto probe = probe_semigroup(A, vectors, times);
  for (std::size_t i = 0; i < probe.fits.size(); ++i) {
    const auto& ns = probe.norms_sq[i];
    const double scale = std::max(1.0, *std::max_element(ns.begin(), ns.end()));
    r.residual[1] = std::max(r.residual[1], probe.fits[i].residual / scale);
  }
  // (iii)
  const double an = A.norm();
  for (const auto& y : vectors) {
    const Vector Ay = A.op * y;
    const double num = std::abs(A.inner(A.op * Ay, y).real() + A.norm_sq(Ay));
    const double den = an * an * A.norm_sq(y);
    r.residual[2] = std::max(r.residual[2], den > 0.0 ? num / den : num);
  }
  // (iv)
  // (iv); a cogenerator that does not exist is not a 2-isometry.
  try {
    const auto V = cayley_cogenerator(A);
    r.residual[3] = two_isometry_defect(V).norm / std::max(1.0, std::pow(V.norm(), 4));
  } catch (const PreconditionError&) {
    r.residual[3] = std::numeric_limits<double>::infinity();
  }

  static constexpr const char* kNames[4] = {"(i) semigroup 2-isometry defect", "(ii) affine norm residual",
                                            "(iii) Re<A^2y,y> + ||Ay||^2", "(iv) cogenerator 2-isometry defect"};
  for (int k = 0; k < 4; ++k) {
    r.holds[k] = r.residual[k] <= tol;
    r.report.record(kNames[k], r.residual[k], r.holds[k] ? "holds" : "fails");
  }
  r.consistent = std::all_of(r.holds.begin(), r.holds.end(), [](bool b) { return b; }) ||
                 std::none_of(r.holds.begin(), r.holds.end(), [](bool b) { return b; });
  r.report.require("conditions agree", r.consistent);
  return r;
}

Prop2Fuzz prop2_fuzz(int count, int max_dim, std::uint64_t seed, double tol) {
  if (count < 1 || max_dim < 2) throw PreconditionError("prop2_fuzz: need count >= 1 and max_dim >= 2");
  Prop2Fuzz f;
  f.cases = count;
  const std::vector<double> times{0.0, 0.25, 0.5, 1.0, 2.0};
  for (int i = 0; i < count; ++i) {
    const int d = 2 + i % (max_dim - 1);
    const std::uint64_t s = seed * 1000003ULL + static_cast<std::uint64_t>(i);
    const bool skew = i < count / 2;
    const MatrixOperator A(skew ? random_skew(d, s) : random_matrix(d, s));
    std::vector<Vector> xs;
    for (std::uint64_t k = 0; k < 3; ++k) xs.push_back(random_vector(d, s + 7919ULL * (k + 1)));
    Prop2Result r = prop2_check(A, xs, times, tol);
    if (r.consistent) ++f.agree;
    if (skew) f.skew_max_residual = std::max(f.skew_max_residual, *std::max_element(r.residual.begin(), r.residual.end()));
    f.skew.push_back(skew);
    f.results.push_back(std::move(r));
  }
  return f;
}

int numerical_rank(const Matrix& M) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > kRankTol * s(0)) ++r;
  return r;
}

Matrix null_space(const Matrix& M) {
  const Eigen::Index n = M.cols();
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (smax > 0.0 && s(i) > kRankTol * smax) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

namespace {
Matrix stacked_kernel_system(const Matrix& gen, std::span<const double> times) {
  const Eigen::Index d = gen.rows();
  std::vector<double> ts;
  for (double t : times)
    if (t > 0.0) ts.push_back(t);
  if (ts.empty()) throw PreconditionError("kernel_intersection_dim: need at least one t > 0");
  Matrix S(static_cast<Eigen::Index>(ts.size()) * d, d);
  for (std::size_t k = 0; k < ts.size(); ++k)
    S.middleRows(static_cast<Eigen::Index>(k) * d, d) =
        expm(ts[k] * gen) - std::exp(-ts[k]) * Matrix::Identity(d, d);
  return S;
}
}  // namespace

int kernel_intersection_dim(const MatrixOperator& A, std::span<const double> times, bool adjoint) {
  const Matrix gen = adjoint ? A.adjoint() : A.op;
  return static_cast<int>(null_space(stacked_kernel_system(gen, times)).cols());
}

Report eigen_lemma_check(const MatrixOperator& A, std::span<const double> times) {
  Report r;
  r.title = "eigen_lemma_check";
  const Eigen::Index d = A.dim();
  const Matrix K1 = null_space(A.op + Matrix::Identity(d, d));
  const Matrix K2 = null_space(stacked_kernel_system(A.op, times));
  r.record("dim ker(A+I)", static_cast<double>(K1.cols()));
  r.record("dim intersection ker(T(t)-e^{-t})", static_cast<double>(K2.cols()));
  r.require("kernel dimensions agree", K1.cols() == K2.cols());
  if (K1.cols() == K2.cols()) {
    const Matrix P1 = K1 * K1.adjoint();
    const Matrix P2 = K2 * K2.adjoint();
    r.bound("subspace gap", spectral_norm(P1 - P2), 1e-8);
  }
  if (K1.cols() > 0) {
    bool regular = true;
    try {
      const auto V = cayley_cogenerator(A);
      r.bound("||V x0||", (V.op * K1).norm(), 1e-12);
    } catch (const PreconditionError&) {
      regular = false;
    }
    r.require("cogenerator defined", regular);
    double worst = 0.0;
    for (double t : times) worst = std::max(worst, (expm(t * A.op) * K1 - std::exp(-t) * K1).norm());
    r.bound("max ||T(t)x0 - e^{-t}x0||", worst, 1e-10);
  }
  r.record("adjoint kernel intersection dim", static_cast<double>(kernel_intersection_dim(A, times, true)));
  return r;
}

std::vector<int> analyticity_probe(const MatrixOperator& T, int n_max) {
  std::vector<int> dims;
  Matrix P = Matrix::Identity(T.dim(), T.dim());
  for (int n = 1; n <= n_max; ++n) {
    P = P * T.op;
    dims.push_back(numerical_rank(P));
  }
  return dims;
}

Matrix random_matrix(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix M(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) M(i, j) = cplx(2.0 * unit_double(rng) - 1.0, 2.0 * unit_double(rng) - 1.0);
  return M;
}

Matrix random_skew(int d, std::uint64_t seed) {
  const Matrix B = random_matrix(d, seed);
  return 0.5 * (B - B.adjoint());
}

Vector random_vector(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = cplx(2.0 * unit_double(rng) - 1.0, 2.0 * unit_double(rng) - 1.0);
  return v;
}

}  // namespace dflow
