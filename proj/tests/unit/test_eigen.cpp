#include <doctest.h>

#include <cmath>

#include "nlslab/eigen.hpp"
#include "support.hpp"

using namespace nlslab;
using namespace nlslab::testing;

namespace {

double angle(const Vec3& a, const Vec3& b) {
  const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
  return std::acos(std::min(1.0, c));
}

bool in_span(const std::vector<Vec3>& basis, const Vec3& v) {
  Vec3 r = v;
  for (const auto& b : basis) r -= b.dot(r) * b;  // bases are orthonormal
  return r.norm() < 1e-8 * v.norm();
}

}  // namespace

TEST_CASE("three distinct eigenvalues of the second example") {
  const EigenStructure e = eigen_decompose(system_b());
  REQUIRE(e.eigenvalues.size() == 3);
  CHECK(e.eigenvalues[0].value.real() == doctest::Approx(2).epsilon(1e-12));
  CHECK(e.eigenvalues[1].value.real() == doctest::Approx(1).epsilon(1e-12));
  CHECK(e.eigenvalues[2].value.real() == doctest::Approx(-1).epsilon(1e-12));
  REQUIRE(e.spaces.size() == 3);
  CHECK(angle(e.spaces[0].basis.at(0), Vec3(1, 0, 0)) < 1e-8);
  CHECK(angle(e.spaces[1].basis.at(0), Vec3(0, 0, 1)) < 1e-8);
  CHECK(angle(e.spaces[2].basis.at(0), Vec3(2, 1, 2)) < 1e-8);
  CHECK(e.rank == 3);
  CHECK_FALSE(e.complex_pair);
}

TEST_CASE("double eigenvalue of the zeta family at one half") {
  const EigenStructure e = eigen_decompose(system_a(0.5));
  const EigenSpace* w1 = e.space(1.0);
  const EigenSpace* wh = e.space(0.5);
  REQUIRE(w1);
  REQUIRE(wh);
  CHECK(w1->multiplicity == 2);
  REQUIRE(w1->basis.size() == 2);
  CHECK(in_span(w1->basis, Vec3(2, 0, 1)));
  CHECK(in_span(w1->basis, Vec3(0, 1, 0)));
  REQUIRE(wh->basis.size() == 1);
  CHECK(angle(wh->basis[0], Vec3(1, 0, 1)) < 1e-8);
}

TEST_CASE("zero matrix") {
  const EigenStructure e = eigen_decompose(SystemRep{});
  REQUIRE(e.eigenvalues.size() == 1);
  CHECK(e.eigenvalues[0].multiplicity == 3);
  CHECK(e.eigenvalues[0].value == cplx(0, 0));
  CHECK(e.rank == 0);
  CHECK(rank_of(SystemRep{}) == 0);
}

TEST_CASE("rank examples") {
  CHECK(rank_of(system_b()) == 3);
  const SystemRep t = from_template(FormTag::A13, {{"lambda1", 0.5}, {"eta1", 1}, {"eta2", 0}, {"eta3", 0}});
  CHECK(rank_of(t) == 2);
  CHECK(eigen_decompose(t).rank == 2);
}

TEST_CASE("basis orientation: unit norm, first nonzero entry positive") {
  const EigenStructure e = eigen_decompose(system_a(0.5));
  for (const auto& sp : e.spaces)
    for (const auto& v : sp.basis) {
      CHECK(v.norm() == doctest::Approx(1).epsilon(1e-12));
      for (int i = 0; i < 3; ++i)
        if (std::abs(v(i)) > 1e-12) {
          CHECK(v(i) > 0);
          break;
        }
    }
}

TEST_CASE("Jordan block: W inside the generalized space") {
  // A12 with nonzero coupling has a size-two block at eigenvalue 1
  const SystemRep s = from_template(
      FormTag::A12, {{"lambda", -0.5}, {"eta1", 1}, {"eta2", 0.3}, {"eta3", -0.3}, {"eta4", 0.7}});
  const EigenStructure e = eigen_decompose(s);
  const EigenSpace* w = e.space(1.0);
  REQUIRE(w);
  CHECK(w->multiplicity == 2);
  CHECK(w->basis.size() == 1);
  CHECK(w->generalized_basis.size() == 2);
  const Mat3 B = s.A - Mat3::Identity();
  for (const auto& v : w->generalized_basis) CHECK((B * B * v).norm() < 1e-8);
  for (const auto& v : w->basis) CHECK(in_span(w->generalized_basis, v));
}

TEST_CASE("random matrices: residuals, trace, determinant, multiplicities") {
  Rng r(13);
  for (int k = 0; k < 500; ++k) {
    SystemRep s;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s.A(i, j) = r.uni(-3, 3);
    const EigenStructure e = eigen_decompose(s);
    int total = 0;
    cplx sum = 0, prod = 1;
    for (const auto& ev : e.eigenvalues) {
      total += ev.multiplicity;
      for (int m = 0; m < ev.multiplicity; ++m) {
        sum += ev.value;
        prod *= ev.value;
      }
    }
    CHECK(total == 3);  // a complex pair is listed with both members
    const double nA = s.A.norm();
    CHECK(std::abs(sum - s.A.trace()) <= 1e-8 * (1 + nA));
    CHECK(std::abs(prod - s.A.determinant()) <= 1e-8 * (1 + nA * nA * nA));
    for (const auto& sp : e.spaces) {
      CHECK(sp.basis.size() <= static_cast<std::size_t>(sp.multiplicity));
      CHECK(sp.generalized_basis.size() == static_cast<std::size_t>(sp.multiplicity));
      for (const auto& v : sp.basis) CHECK((s.A * v - sp.lambda * v).norm() <= 10 * e.cluster_tol * nA);
    }
    if (const EigenSpace* z = e.space(0.0, 1e-9)) CHECK(static_cast<int>(z->basis.size()) + e.rank == 3);
  }
}

TEST_CASE("complex pair is flagged, only the real eigenvalue gets a space") {
  SystemRep s;
  s.A << 0, -1, 0, 1, 0, 0, 0, 0, 2;
  const EigenStructure e = eigen_decompose(s);
  CHECK(e.complex_pair);
  CHECK(e.spaces.size() == 1);
  CHECK(e.spaces[0].lambda == doctest::Approx(2));
}

TEST_CASE("null space helper") {
  Mat3 B = Mat3::Zero();
  B(0, 0) = 1;
  const auto ns = null_space(B, 1e-12, 1.0);
  CHECK(ns.size() == 2);
  for (const auto& v : ns) CHECK((B * v).norm() < 1e-14);
}
