#include "nlslab/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace nlslab {

namespace {

constexpr double kDefectWindow = 1e-3;  // candidate pairs for re-joining a split Jordan block

void fix_sign(Vec3& v) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

Mat3 matpow(const Mat3& B, int k) {
  Mat3 r = Mat3::Identity();
  for (int i = 0; i < k; ++i) r = r * B;
  return r;
}

struct Cluster {
  cplx sum{0, 0};
  int count = 0;
  cplx mean() const { return sum / double(count); }
};

}  // namespace

std::vector<Vec3> canonical_basis(const std::vector<Vec3>& vs) {
  const int k = static_cast<int>(vs.size());
  if (k == 0) return {};
  // Row echelon form of the k x 3 matrix whose rows span the subspace.
  Eigen::MatrixXd R(k, 3);
  for (int i = 0; i < k; ++i) R.row(i) = vs[static_cast<std::size_t>(i)].transpose();
  int row = 0;
  for (int col = 0; col < 3 && row < k; ++col) {
    int piv = row;
    for (int i = row + 1; i < k; ++i)
      if (std::abs(R(i, col)) > std::abs(R(piv, col))) piv = i;
    if (std::abs(R(piv, col)) < 1e-9 * R.cwiseAbs().maxCoeff()) continue;
    R.row(row).swap(R.row(piv));
    R.row(row) /= R(row, col);
    for (int i = 0; i < k; ++i)
      if (i != row) R.row(i) -= R(i, col) * R.row(row);
    ++row;
  }
  std::vector<Vec3> out;
  for (int i = 0; i < row; ++i) {
    Vec3 v = R.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : out) v -= e.dot(v) * e;
    if (v.norm() < 1e-12) continue;
    v.normalize();
    fix_sign(v);
    out.push_back(v);
  }
  return out;
}

std::vector<Vec3> null_space(const Mat3& B, double tol, double scale, int max_dim) {
  Eigen::JacobiSVD<Mat3> svd(B, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<Vec3> raw;
  for (int i = 2; i >= 0 && static_cast<int>(raw.size()) < max_dim; --i) {
    if (sv(i) <= tol * scale) raw.push_back(svd.matrixV().col(i));
    else break;
  }
  return canonical_basis(raw);
}

int rank_of(const SystemRep& s, double tol) {
  if (tol <= 0) throw Error(Errc::InvalidArgument, "rank tolerance must be positive");
  Eigen::JacobiSVD<Mat3> svd(s.A);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < 3; ++i)
    if (sv(i) > tol * sv(0)) ++r;
  return r;
}

std::vector<double> EigenStructure::real_eigenvalues() const {
  std::vector<double> out;
  for (const auto& e : eigenvalues)
    if (e.is_real()) out.push_back(e.value.real());
  return out;
}

const EigenSpace* EigenStructure::space(double lambda, double tol) const {
  const double band = tol * std::max(norm, 1.0);
  for (const auto& sp : spaces)
    if (std::abs(sp.lambda - lambda) <= band) return &sp;
  return nullptr;
}

EigenStructure eigen_decompose(const SystemRep& s, double cluster_tol) {
  if (!(cluster_tol > 0)) throw Error(Errc::InvalidArgument, "cluster_tol must be positive");
  EigenStructure es;
  es.cluster_tol = cluster_tol;
  es.norm = s.A.norm();
  const Mat3& A = s.A;

  if (es.norm == 0.0) {
    es.eigenvalues.push_back({cplx(0, 0), 3});
    EigenSpace sp;
    sp.lambda = 0;
    sp.multiplicity = 3;
    sp.basis = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    sp.generalized_basis = sp.basis;
    es.spaces.push_back(sp);
    es.rank = 0;
    es.min_gap = 0;
    return es;
  }

  const double nA = es.norm;
  Eigen::EigenSolver<Mat3> solver(A, false);
  std::vector<cplx> raw(3);
  for (int i = 0; i < 3; ++i) raw[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);

  // 1. clusters within the declared band
  std::vector<Cluster> cl;
  for (const auto& l : raw) {
    bool placed = false;
    for (auto& c : cl) {
      if (std::abs(c.mean() - l) <= cluster_tol * nA) {
        c.sum += l;
        ++c.count;
        placed = true;
        break;
      }
    }
    if (!placed) cl.push_back({l, 1});
  }

  // 2. re-join numerically split Jordan blocks: eigenvalues of a defective block
  // separate like sqrt(rounding), far outside the band, but the corresponding power
  // of A - mu E still annihilates a space of the combined dimension.
  const double defect_thr = std::pow(100 * cluster_tol, 2);
  bool changed = true;
  while (changed && cl.size() > 1) {
    changed = false;
    for (std::size_t i = 0; i < cl.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < cl.size() && !changed; ++j) {
        if (std::abs(cl[i].mean() - cl[j].mean()) > kDefectWindow * nA) continue;
        const cplx mu = (cl[i].sum + cl[j].sum) / double(cl[i].count + cl[j].count);
        if (std::abs(mu.imag()) > cluster_tol * nA) continue;
        const int m = cl[i].count + cl[j].count;
        const Mat3 B = matpow(A - mu.real() * Mat3::Identity(), m);
        Eigen::JacobiSVD<Mat3> svd(B);
        // the m smallest singular values must vanish
        if (svd.singularValues()(3 - m) <= defect_thr * std::pow(nA, m)) {
          cl[i].sum += cl[j].sum;
          cl[i].count += cl[j].count;
          cl.erase(cl.begin() + static_cast<std::ptrdiff_t>(j));
          es.defect_merged = true;
          changed = true;
        }
      }
    }
  }

  // 3. finalize values; tiny imaginary parts are rounding
  std::vector<Eigenvalue> reals, complexes;
  for (const auto& c : cl) {
    cplx v = c.mean();
    if (std::abs(v.imag()) <= cluster_tol * nA) {
      reals.push_back({cplx(v.real(), 0.0), c.count});
    } else if (v.imag() > 0) {
      complexes.push_back({v, c.count});
      complexes.push_back({std::conj(v), c.count});
    }
  }
  std::sort(reals.begin(), reals.end(),
            [](const Eigenvalue& a, const Eigenvalue& b) { return a.value.real() > b.value.real(); });
  es.eigenvalues = reals;
  es.eigenvalues.insert(es.eigenvalues.end(), complexes.begin(), complexes.end());
  es.complex_pair = !complexes.empty();

  double gap = INFINITY;
  for (std::size_t i = 0; i < es.eigenvalues.size(); ++i)
    for (std::size_t j = i + 1; j < es.eigenvalues.size(); ++j)
      gap = std::min(gap, std::abs(es.eigenvalues[i].value - es.eigenvalues[j].value) / nA);
  es.min_gap = std::isfinite(gap) ? gap : 0.0;
  es.borderline = std::isfinite(gap) && gap <= 10 * cluster_tol;

  // 4. eigenspaces and generalized eigenspaces by SVD null spaces
  const double null_tol = 1e-6;
  es.rank = 3;
  for (const auto& e : reals) {
    EigenSpace sp;
    sp.lambda = e.value.real();
    sp.multiplicity = e.multiplicity;
    const Mat3 B = A - sp.lambda * Mat3::Identity();
    sp.basis = null_space(B, null_tol, nA, e.multiplicity);
    if (sp.basis.empty()) {
      // always at least one eigenvector: take the weakest direction
      Eigen::JacobiSVD<Mat3> svd(B, Eigen::ComputeFullV);
      sp.basis = canonical_basis({svd.matrixV().col(2)});
    }
    if (e.multiplicity == 1) {
      sp.generalized_basis = sp.basis;
    } else {
      Eigen::JacobiSVD<Mat3> svd(matpow(B, e.multiplicity), Eigen::ComputeFullV);
      std::vector<Vec3> g;
      for (int k = 0; k < e.multiplicity; ++k) g.push_back(svd.matrixV().col(2 - k));
      sp.generalized_basis = canonical_basis(g);
    }
    if (std::abs(sp.lambda) <= cluster_tol * nA) {
      sp.lambda = 0.0;
      es.rank = 3 - static_cast<int>(sp.basis.size());
    }
    es.spaces.push_back(sp);
  }
  for (std::size_t i = 0; i < reals.size(); ++i)
    es.eigenvalues[i].value = cplx(es.spaces[i].lambda, 0.0);
  return es;
}

}  // namespace nlslab
