#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sqg/qrings.hpp"

using namespace sqg;

TEST_CASE("monoids") {
  CHECK(Monoid::trivial().validate().ok());
  CHECK(Monoid::cyclic2().validate().ok());
  CHECK(Monoid::left_zero3().validate().ok());
  CHECK(Monoid::cyclic2().commutative());
  CHECK(!Monoid::left_zero3().commutative());
}

TEST_CASE("znil as a quadratic ring") {
  QuadraticRing r = qring_znil();
  CHECK(validate_qring(r).ok());
  CHECK(is_commutative_qring(r));
  SUBCASE("H(4) = 6 = 4 H(2) + H(2) Delta(2) via axiom (vii) at x=y=2") {
    const Nil2Datum& e = r.r.e();
    Nil2Element two = e.scaled(2, e.mark(0));
    FgabElement h4 = r.r.apply_h(r.mul(two, two));
    CHECK(h4 == r.r.ee().canonical_gen(0).scaled(6));
    FgabElement rhs = r.mul_ee_elts(r.r.cross(two, two), r.r.apply_h(two)) +
                      r.mul_ee_elts(r.r.apply_h(two), r.r.delta().apply(r.r.cokp_class(two)));
    CHECK(h4 == rhs);  // 4*1 + 1*2
  }
}

TEST_CASE("monoid rings") {
  SUBCASE("trivial monoid gives znil") {
    QuadraticRing r = monoid_ring(Monoid::trivial());
    CHECK(validate_qring(r).ok());
    CHECK(r.r.ee().invariant_factors() == Vec{0});
  }
  SUBCASE("two-element monoid") {
    QuadraticRing r = monoid_ring(Monoid::cyclic2());
    CHECK(validate_qring(r).ok());
    CHECK(is_commutative_qring(r));
  }
  SUBCASE("noncommutative witness") {
    QuadraticRing r = monoid_ring(Monoid::left_zero3());
    CHECK(validate_qring(r).ok());
    CHECK(!is_commutative_qring(r));
  }
  SUBCASE("linear elements contain the monoid") {
    CHECK(monoid_linear_elements_check(Monoid::cyclic2()).ok());
    CHECK(monoid_linear_elements_check(Monoid::left_zero3()).ok());
  }
  SUBCASE("adjunction bijection on small monoids") {
    CHECK(monoid_adjunction_check(Monoid::trivial(), Monoid::cyclic2()).ok());
    CHECK(monoid_adjunction_check(Monoid::cyclic2(), Monoid::cyclic2()).ok());
  }
}

TEST_CASE("psi") {
  QuadraticRing r = qring_znil();
  PsiData p = psi_data(r);
  SUBCASE("codomain and values") {
    CHECK(p.codomain.invariant_factors() == Vec{2});
    CHECK(p.psi(r.r.e().mark(0)).is_zero());                      // psi(1) = 0
    Nil2Element two = r.r.e().scaled(2, r.r.e().mark(0));
    CHECK(p.psi(two) == p.codomain.canonical_gen(0));             // psi(2) = 1
    // additivity defect at x=y=1: psi(2) = 0 + 0 - k(1)k(1) = -1 = 1 mod 2
    FgabElement k1 = p.kval(r.r.e().mark(0));
    DerivedData d = derive(r.r);
    FgabElement prod = d.classify(r.mul_ee_elts(r.r.cross(r.r.e().mark(0), r.r.e().mark(0)),
                                                r.r.cross(r.r.e().mark(0), r.r.e().mark(0))));
    CHECK(p.psi(two) == p.psi(r.r.e().mark(0)) + p.psi(r.r.e().mark(0)) - prod);
    CHECK(!k1.is_zero());
  }
  SUBCASE("laws") {
    CHECK(psi_checks(r).ok());
    CHECK(psi_checks(monoid_ring(Monoid::cyclic2())).ok());
  }
  SUBCASE("noncommutative input rejected") {
    CHECK_THROWS_AS(psi_data(monoid_ring(Monoid::left_zero3())), SqgError);
  }
}

TEST_CASE("modules") {
  QuadraticRing r = monoid_ring(Monoid::cyclic2());
  QuadraticModule m = ring_as_module(r);
  CHECK(validate_qmodule(m, r).ok());
  CHECK(validate_qmodule(ring_as_module(qring_znil()), qring_znil()).ok());
}

TEST_CASE("square rings") {
  SUBCASE("U(znil) = znil as a square ring") {
    SquareRing q = qr_to_sr(qring_znil());
    CHECK(validate_sqring(q).ok());
    // U preserves units and multiplication
    CHECK(q.mul(q.unit, q.unit) == q.unit);
  }
  SUBCASE("U of a monoid ring") {
    CHECK(validate_sqring(qr_to_sr(monoid_ring(Monoid::cyclic2()))).ok());
    CHECK(validate_sqring(qr_to_sr(monoid_ring(Monoid::left_zero3()))).ok());
  }
}
