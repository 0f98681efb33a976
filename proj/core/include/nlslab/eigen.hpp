#pragma once

#include <optional>
#include <vector>

#include "nlslab/algebra.hpp"

namespace nlslab {

inline constexpr double kClusterTol = 1e-8;

struct Eigenvalue {
  cplx value;        // real eigenvalues have value.imag() == 0 exactly
  int multiplicity;  // algebraic
  bool is_real() const { return value.imag() == 0.0; }
};

struct EigenSpace {
  double lambda = 0;
  int multiplicity = 0;
  std::vector<Vec3> basis;              // W(lambda), orthonormal
  std::vector<Vec3> generalized_basis;  // W~(lambda), orthonormal
};

struct EigenStructure {
  std::vector<Eigenvalue> eigenvalues;  // real ones first, descending
  std::vector<EigenSpace> spaces;       // one per real eigenvalue, same order
  int rank = 3;
  double cluster_tol = kClusterTol;
  double norm = 0;             // Frobenius norm of A
  bool complex_pair = false;   // ComplexPairOnly flag
  bool borderline = false;     // some gap within 10x of the cluster band
  bool defect_merged = false;  // a numerically split Jordan block was re-joined
  double min_gap = 0;          // smallest separation between reported eigenvalues, relative to norm

  std::vector<double> real_eigenvalues() const;
  const EigenSpace* space(double lambda, double tol = 1e-9) const;
};

EigenStructure eigen_decompose(const SystemRep& s, double cluster_tol = kClusterTol);
int rank_of(const SystemRep& s, double tol = 1e-9);

// Orthonormal basis of ker(B) by SVD; singular values below tol * scale count as zero,
// at most max_dim vectors are returned. Output is canonicalized (echelon order, signs).
std::vector<Vec3> null_space(const Mat3& B, double tol, double scale, int max_dim = 3);
// Orthonormalize and fix orientation: echelon order, first nonzero entry positive.
std::vector<Vec3> canonical_basis(const std::vector<Vec3>& vs);

}  // namespace nlslab
