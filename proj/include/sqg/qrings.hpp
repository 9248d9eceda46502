#pragma once

// Quadratic rings (monoids for the tensor product), R-quadratic modules,
// square rings (monoids for the box product), and the comparison functor.

#include "sqg/boxcomp.hpp"
#include "sqg/sqcore.hpp"

namespace sqg {

struct Monoid {
  std::size_t n = 0;
  std::size_t unit = 0;
  std::vector<std::vector<std::size_t>> table;  // table[i][j] = i*j
  Report validate() const;
  bool commutative() const;
  static Monoid trivial();
  static Monoid cyclic2();      // {1, t}, t^2 = 1
  static Monoid left_zero3();   // {1, a, b} with a*x = a, b*x = b (noncommutative)
};

struct QuadraticRing {
  SquareGroup r;
  Nil2Element unit;
  std::vector<std::vector<Nil2Element>> mul_e;   // mark x mark
  std::vector<std::vector<FgabElement>> mul_ee;  // ee gen x ee gen

  Nil2Element mul(const Nil2Element& x, const Nil2Element& y) const;
  FgabElement mul_ee_elts(const FgabElement& a, const FgabElement& b) const;
};

QuadraticRing qring_znil();
QuadraticRing monoid_ring(const Monoid& m);

Report validate_qring(const QuadraticRing& r);
bool is_commutative_qring(const QuadraticRing& r);

// cup-1 style quadratic map on Coker(P), valued in Ker(P: ee/(Id-T) -> e)
struct PsiData {
  FgAbelianGroup codomain;
  std::function<FgabElement(const Nil2Element&)> psi;   // psi(xbar) via a representative
  std::function<FgabElement(const Nil2Element&)> kval;  // k(xbar) via (x|x)_H
};
PsiData psi_data(const QuadraticRing& r);
Report psi_checks(const QuadraticRing& r);

// right R-quadratic module, given by action tables
struct QuadraticModule {
  SquareGroup m;
  std::vector<std::vector<Nil2Element>> act_e;   // m-mark x r-mark
  std::vector<std::vector<FgabElement>> act_ee;  // m-ee gen x r-ee gen
  Nil2Element act(const Nil2Element& x, const Nil2Element& rr, const QuadraticRing& r) const;
  FgabElement act_ee_elts(const FgabElement& a, const FgabElement& b) const;
};
QuadraticModule ring_as_module(const QuadraticRing& r);
Report validate_qmodule(const QuadraticModule& m, const QuadraticRing& r);

// square rings
struct SquareRing {
  SquareGroup q;
  Nil2Element unit;
  std::vector<std::vector<Nil2Element>> mul_e;  // mark x mark
  // (xbar ten ybar) . u . zbar
  std::function<FgabElement(const FgabElement&, const FgabElement&, const FgabElement&,
                            const FgabElement&)>
      action;
  Nil2Element mul(const Nil2Element& x, const Nil2Element& y) const;
};
SquareRing qr_to_sr(const QuadraticRing& r);
Report validate_sqring(const SquareRing& q);

// linear elements of a monoid ring form the monoid (plus zero); adjunction of
// the monoid-ring functor against the linear-element functor on small cases
Report monoid_linear_elements_check(const Monoid& m);
Report monoid_adjunction_check(const Monoid& m, const Monoid& mp);

}  // namespace sqg
