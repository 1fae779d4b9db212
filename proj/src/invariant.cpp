#include "dflow/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dflow {

namespace {

constexpr double kRankTol = 1e-8;
constexpr int kRefine = 8;

template <class Modulus>
DensityTable boost_density(const DensityTable& d, Modulus&& mod_sq) {
  DensityTable out;
  for (std::size_t i = 0; i + 1 < d.grid.size(); ++i)
    for (int j = 0; j < kRefine; ++j) out.grid.push_back(d.grid[i] + (d.grid[i + 1] - d.grid[i]) * j / kRefine);
  out.grid.push_back(d.grid.back());
  for (double x : out.grid) out.values.push_back(d.at(x) * mod_sq(x));
  return out;
}

double boundary_mod_sq(const DiscFunction& phi, double theta) {
  const auto v = phi.boundary_value(theta);
  if (!v) throw PreconditionError("boost_circle: multiplier has no boundary value at theta = " + std::to_string(theta));
  return std::norm(*v);
}

double boundary_mod_sq(const HalfPlaneFunction& psi, double tau) {
  const auto v = psi.boundary_value(tau);
  if (!v) throw PreconditionError("boost_line: multiplier has no boundary value at tau = " + std::to_string(tau));
  return std::norm(*v);
}

// Euclidean orthonormal basis of the column span.
Matrix range_basis(const Matrix& B) {
  if (B.cols() == 0) return Matrix(B.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(0) > 0.0 && s(i) > kRankTol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

// Columns made orthonormal in y^H G x.
Matrix g_orthonormal(const Matrix& Q, const Matrix& G) {
  const Matrix S = Q.adjoint() * G * Q;
  Eigen::LLT<Matrix> llt(0.5 * (S + S.adjoint()));
  if (llt.info() != Eigen::Success) throw PreconditionError("g_orthonormal: columns are dependent");
  // Q L^{-H}
  return llt.matrixU().solve<Eigen::OnTheRight>(Q);
}

int effective_degree(const Vector& c) {
  const double m = c.cwiseAbs().maxCoeff();
  int d = 0;
  for (Eigen::Index k = 0; k < c.size(); ++k)
    if (std::abs(c(k)) > kRankTol * m) d = static_cast<int>(k);
  return d;
}

Matrix boosted_gram(const CircleMeasure& mu_phi, int N) {
  const Matrix E = gram_energy_boundary(mu_phi, N);
  return Matrix::Identity(N + 1, N + 1) + 0.5 * (E + E.adjoint());
}

}  // namespace

CircleMeasure boost_circle(const CircleMeasure& mu, const DiscFunction& phi) {
  std::vector<CircleAtom> atoms;
  for (const auto& a : mu.atoms()) atoms.push_back({a.theta, a.mass * boundary_mod_sq(phi, a.theta)});
  std::optional<DensityTable> d;
  if (mu.density()) d = boost_density(*mu.density(), [&](double th) { return boundary_mod_sq(phi, th); });
  return CircleMeasure(std::move(atoms), std::move(d));
}

LineMeasure boost_line(const LineMeasure& nu, const HalfPlaneFunction& psi) {
  std::vector<LineAtom> atoms;
  for (const auto& a : nu.atoms()) atoms.push_back({a.tau, a.mass * boundary_mod_sq(psi, a.tau)});
  std::optional<DensityTable> d;
  if (nu.density()) d = boost_density(*nu.density(), [&](double tau) { return boundary_mod_sq(psi, tau); });
  return LineMeasure(std::move(atoms), std::move(d));
}

HalfPlaneWeightSpec boost_weight(const HalfPlaneWeightSpec& w, const HalfPlaneFunction& psi) {
  w.validate();
  HalfPlaneWeightSpec out;
  out.rho = 0.0;
  if (w.rho > 0.0) {
    const auto inf = psi.at_infinity();
    if (!inf) throw PreconditionError("boost_weight: multiplier has no limit at infinity but rho > 0");
    out.rho = w.rho * std::norm(*inf);
  }
  out.nu = boost_line(w.nu, psi);
  return out;
}

Matrix cyclic_span(std::span<const std::vector<cplx>> generators, int N, int first) {
  if (N < 0) throw PreconditionError("cyclic_span: degree must be >= 0");
  std::vector<Vector> cols;
  for (const auto& g : generators) {
    int deg = -1;
    for (std::size_t k = 0; k < g.size(); ++k)
      if (g[k] != cplx(0.0)) deg = static_cast<int>(k);
    if (deg < 0) continue;
    for (int k = first; k + deg <= N; ++k) {
      Vector v = Vector::Zero(N + 1);
      for (int j = 0; j <= deg; ++j) v(k + j) = g[j];
      cols.push_back(std::move(v));
    }
  }
  Matrix B(N + 1, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) B.col(static_cast<Eigen::Index>(i)) = cols[i];
  return B;
}

WanderingResult wandering_vector(const GramModel& gm, std::span<const std::vector<cplx>> generators) {
  const int N = gm.degree;
  const Matrix UM = range_basis(cyclic_span(generators, N, 0));
  if (UM.cols() == 0) throw PreconditionError("wandering_vector: the generated subspace is empty");
  const Matrix UZ = range_basis(cyclic_span(generators, N, 1));
  Matrix C;
  if (UZ.cols() == 0) {
    C = Matrix::Identity(UM.cols(), UM.cols());
  } else {
    C = null_space(UZ.adjoint() * gm.gram * UM);
  }
  WanderingResult r;
  r.dim = static_cast<int>(C.cols());
  if (r.dim > 0) r.basis = g_orthonormal(UM * C, gm.gram);
  return r;
}

std::vector<double> principal_angles(const Matrix& A, const Matrix& B, const Matrix& G) {
  Matrix QA = range_basis(A), QB = range_basis(B);
  if (QA.cols() == 0 || QB.cols() == 0) return {};
  if (QB.cols() > QA.cols()) std::swap(QA, QB);
  QA = g_orthonormal(QA, G);
  QB = g_orthonormal(QB, G);
  // Sines from the component of span B orthogonal to span A, measured in G.
  const Matrix R = QB - QA * (QA.adjoint() * G * QB);
  Eigen::LLT<Matrix> llt(0.5 * (G + G.adjoint()));
  const Matrix LR = llt.matrixU() * R;
  Eigen::JacobiSVD<Matrix> svd(LR);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    out.push_back(std::asin(std::min(1.0, svd.singularValues()(i))));
  return out;
}

Report representation_check(const GramModel& gm, std::span<const std::vector<cplx>> generators, double tol) {
  Report r;
  r.title = "representation_check";
  const int N = gm.degree;
  const WanderingResult w = wandering_vector(gm, generators);
  r.record("dim_wandering", w.dim);
  r.require("dim_is_one", w.dim == 1, "dim(M minus zM) = " + std::to_string(w.dim));
  if (w.dim == 0) return r;

  Vector phi = w.basis.col(0);
  Eigen::Index lead = 0;
  phi.cwiseAbs().maxCoeff(&lead);
  phi *= std::conj(phi(lead)) / std::abs(phi(lead));
  const int deg = effective_degree(phi);
  r.record("phi_degree", deg);
  for (Eigen::Index k = 0; k <= deg; ++k) {
    std::ostringstream re, im;
    re << "phi_re[" << k << "]";
    im << "phi_im[" << k << "]";
    r.record(re.str(), phi(k).real());
    r.record(im.str(), phi(k).imag());
  }

  std::vector<cplx> pc(phi.data(), phi.data() + deg + 1);
  const CircleMeasure mu_phi = boost_circle(gm.measure, DiscFunction::polynomial(pc));
  const Matrix Gphi = boosted_gram(mu_phi, N);

  Matrix PB = Matrix::Zero(N + 1, N - deg + 1);
  for (int j = 0; j + deg <= N; ++j) PB.block(j, j, deg + 1, 1) = phi.head(deg + 1);
  const Matrix M = cyclic_span(generators, N, 0);

  const auto ang = principal_angles(M, PB, Gphi);
  const double amax = ang.empty() ? 0.0 : *std::max_element(ang.begin(), ang.end());
  r.bound("max_principal_angle", amax, tol).note = "metric of |phi|^2 mu";
  const auto ang_mu = principal_angles(M, PB, gm.gram);
  r.record("max_principal_angle_mu_metric", ang_mu.empty() ? 0.0 : *std::max_element(ang_mu.begin(), ang_mu.end()));

  double lo = INFINITY, hi = 0.0;
  for (int j = 0; j + deg <= N; ++j) {
    const Vector v = PB.col(j);
    const double ratio = std::sqrt(v.dot(gm.gram * v).real() / Gphi(j, j).real());
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  r.record("norm_ratio_min", lo, "||phi z^j||_mu / ||z^j||_{mu_phi}");
  r.record("norm_ratio_max", hi);
  return r;
}

Report representation_stability(const CircleMeasure& mu, std::span<const std::vector<cplx>> generators,
                                std::span<const int> degrees, const DiscQuadrature& q) {
  Report r;
  r.title = "representation_stability";
  std::vector<double> angles;
  bool dims_ok = true;
  for (int N : degrees) {
    const Report one = representation_check(build_gram(mu, N, q), generators);
    const ReportItem* dim = one.find("dim_wandering");
    const ReportItem* ang = one.find("max_principal_angle");
    std::ostringstream dn, an;
    dn << "dim[N=" << N << "]";
    an << "angle[N=" << N << "]";
    r.record(dn.str(), dim->value);
    dims_ok = dims_ok && dim->value == 1.0;
    if (ang) {
      r.record(an.str(), ang->value);
      angles.push_back(ang->value);
    }
  }
  r.require("dims_all_one", dims_ok);
  bool monotone = angles.size() == degrees.size();
  // 1e-12 absorbs rounding when the angles are zero to working precision.
  for (std::size_t i = 1; monotone && i < angles.size(); ++i) monotone = angles[i] <= angles[i - 1] + 1e-12;
  r.require("angles_non_increasing", monotone);
  return r;
}

}  // namespace dflow
