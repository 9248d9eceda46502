#pragma once

// Abelian groups with cosymmetry: delta : A -> Sym^2(A) with
// delta(a+b) = delta(a) + delta(b) + ab. The functor J builds a square group
// from the pullback of delta against the symmetrization; Psi inverts it on
// the subcategory where the cross-effect homomorphism is an isomorphism.

#include "sqg/sqcore.hpp"
#include "sqg/tensor.hpp"

namespace sqg {

struct CosymmetryObject {
  FgAbelianGroup a;
  Sym2Group sym;
  std::vector<FgabElement> delta_vals;  // per canonical generator of a

  FgabElement delta(const FgabElement& x) const;  // quadratic extension
};

Report cos_validate(const CosymmetryObject& x);
CosymmetryObject cos_free(std::size_t n);  // (Z[S], 0)
CosymmetryObject cos_unit();               // (Z, binom(-,2))
CosymmetryObject make_cosym(const FgAbelianGroup& a, const std::vector<FgabElement>& delta_vals);

CosymmetryObject cos_tensor(const CosymmetryObject& x, const CosymmetryObject& y);
Report cos_tensor_checks(const CosymmetryObject& x, const CosymmetryObject& y);

SquareGroup J(const CosymmetryObject& x);
bool is_sg_sigma(const SquareGroup& m);
CosymmetryObject Psi(const SquareGroup& m);  // requires is_sg_sigma

Report cosym_roundtrip(const CosymmetryObject& x);  // Psi(J(x)) = x
Report sg_roundtrip(const SquareGroup& m);          // J(Psi(m)) iso m
Report cos_z2_obstruction();                        // no cosymmetry on Z/2
Report j_monoidal_check(const CosymmetryObject& x, const CosymmetryObject& y);
Report sg_sigma_iso_criterion(const SgMorphism& f);  // iso iff CokP iso

}  // namespace sqg
