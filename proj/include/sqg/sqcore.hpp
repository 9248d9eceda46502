#pragma once

// Square groups: a diagram  M_e -H-> M_ee -P-> M_e  with P a homomorphism
// into the center, H quadratic, satisfying
//   (Pa|y)_H = 0 = (x|Pb)_H,   P(x|y)_H = -x-y+x+y,   PHP = 2P.
// Derived operators: T = HP - Id (involution), Delta on Coker(P), the
// cross-effect homomorphism Coker(P) x Coker(P) -> M_ee, and the invariant
// k : Coker(P) -> Ker(P : M_ee/(Id-T) -> M_e).

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqg/nil2.hpp"
#include "sqg/report.hpp"
#include "sqg/zalgebra.hpp"

namespace sqg {

struct SqData;

class SquareGroup {
 public:
  SquareGroup() = default;
  // pvals: one central element of e per canonical generator of ee.
  static SquareGroup make(Nil2Datum e, FgAbelianGroup ee, std::vector<Nil2Element> pvals,
                          QuadraticMap h, std::string shape = "");

  const Nil2Datum& e() const;
  const FgAbelianGroup& ee() const;
  const QuadraticMap& h() const;
  const std::vector<Nil2Element>& pvals() const;
  const std::string& shape() const;

  Nil2Element apply_p(const FgabElement& a) const;
  FgabElement apply_h(const Nil2Element& x) const;
  FgabElement cross(const Nil2Element& x, const Nil2Element& y) const;  // (x|y)_H

  const FgabHom& t() const;                 // T = HP - Id on ee
  const FgAbelianGroup& cokp() const;       // Coker(P)
  FgabElement cokp_class(const Nil2Element& x) const;
  FgabElement cokp_proj_ab(std::size_t ab_gen) const;  // class of an abelianization generator
  Nil2Element cokp_lift(const FgabElement& xbar) const;  // a chosen lift
  const FgabHom& delta() const;             // Coker(P) -> ee
  const TensorAb& cok_sq() const;           // Coker(P) tensor Coker(P)
  const FgabHom& cross_hom() const;         // cok_sq -> ee

  bool is_zero_object() const;
  bool is_abelian_sg() const;       // cross effect vanishes
  bool is_quadratic_zmodule() const;  // abelian and Delta = 0
  bool levels_finite() const;

  bool same_instance(const SquareGroup& o) const;
  std::string str() const;
  std::shared_ptr<const SqData> data() const { return d_; }

 private:
  explicit SquareGroup(std::shared_ptr<const SqData> d) : d_(std::move(d)) {}
  std::shared_ptr<const SqData> d_;
};

class SgMorphism {
 public:
  SgMorphism() = default;
  SgMorphism(SquareGroup src, SquareGroup dst, Nil2Hom fe, FgabHom fee);
  static SgMorphism identity(const SquareGroup& m);
  static SgMorphism zero(const SquareGroup& src, const SquareGroup& dst);

  const SquareGroup& src() const { return src_; }
  const SquareGroup& dst() const { return dst_; }
  const Nil2Hom& fe() const { return fe_; }
  const FgabHom& fee() const { return fee_; }

  SgMorphism then(const SgMorphism& g) const;
  Report validate() const;
  bool equals(const SgMorphism& o) const;
  bool is_iso() const;

 private:
  SquareGroup src_, dst_;
  Nil2Hom fe_;
  FgabHom fee_;
};

// Full axiom report for Def-style identities; checked on generators and
// generator pairs, which suffices since the laws are linear/bilinear/quadratic
// in each slot and generators span both levels.
Report validate_square_group(const SquareGroup& m);

struct DerivedData {
  FgabHom t;
  FgAbelianGroup cokp;
  FgabHom delta;      // cokp -> ee
  FgabHom cross_hom;  // cokp tensor cokp -> ee
  // Ker(P : ee/(Id-T) -> M_e) with coordinates
  FgAbelianGroup kgroup;
  FgabHom k;  // cokp -> kgroup
  std::function<FgabElement(const FgabElement&)> classify;  // ee elt -> kgroup
  Report invariants;  // T^2=Id, PT=P, T-cross antisymmetry, Delta laws
};
DerivedData derive(const SquareGroup& m);

// n-star endomorphism of the e-level: x -> nx + binom(n,2) PH(x).
Nil2Hom n_star(const SquareGroup& m, const Int& n);
Report n_star_checks(const SquareGroup& m, const Int& n, const Int& mm);

// --- constructors -----------------------------------------------------------

SquareGroup znil();
SquareGroup znil_set(const std::vector<std::string>& s);
SquareGroup a_tensor(const FgAbelianGroup& a);
SquareGroup zq();
SquareGroup v_free(std::size_t n);
SquareGroup e_involution(const FgAbelianGroup& l, const FgabHom& tau);
SquareGroup from_abelian(const FgAbelianGroup& a);
SquareGroup sg_product(const SquareGroup& m, const SquareGroup& n);
std::vector<SgMorphism> sg_product_projections(const SquareGroup& prod, const SquareGroup& m,
                                               const SquareGroup& n);
std::vector<SgMorphism> sg_product_injections(const SquareGroup& prod, const SquareGroup& m,
                                              const SquareGroup& n);
SquareGroup free_sq(std::size_t s, std::size_t t);  // V(s) x (Z[t]-tensor)
SquareGroup zero_sq();

// --- subobjects, quotients, cokernels --------------------------------------

struct SubSquareGroup {
  SquareGroup owner;
  std::vector<Nil2Element> e_gens;
  std::vector<FgabElement> ee_gens;
};

SubSquareGroup kernel(const SgMorphism& f);
bool is_normal(const SubSquareGroup& k);

struct SgQuotient {
  SquareGroup group;
  SgMorphism proj;
};
SgQuotient quotient(const SquareGroup& m, const SubSquareGroup& k);  // k must be normal
SgQuotient cokernel(const SgMorphism& f);
// quotient by the smallest normal sub-square group containing the given
// elements at each level
SgQuotient sg_quotient_by(const SquareGroup& m, const std::vector<Nil2Element>& e_kill,
                          const std::vector<FgabElement>& ee_kill);
bool is_epi(const SgMorphism& f);
bool is_mono(const SgMorphism& f);

struct SgCoproduct {
  SquareGroup group;
  SquareGroup left, right;
  SgMorphism inj_left, inj_right;
};
SgCoproduct coproduct(const SquareGroup& m, const SquareGroup& n);
// universal property: the unique morphism with h inj_left = f, h inj_right = g
SgMorphism coproduct_induced(const SgCoproduct& cp, const SgMorphism& f, const SgMorphism& g);

// Free cover F = V(marks) x (Z[ee gens])^tensor with its epimorphism onto m.
struct FreeCover {
  SquareGroup cover;
  SgMorphism onto;
};
FreeCover free_cover(const SquareGroup& m);

// --- short exact sequences ---------------------------------------------------

struct SgSes {
  SgMorphism incl;  // A -> B
  SgMorphism proj;  // B -> C
};
Report validate_ses(const SgSes& s);

// Lemma-style centralizer refinement of a short exact sequence.
struct CentralizerRefinement {
  SquareGroup aprime;
  SgMorphism aprime_into_a;
  SgQuotient a_mod, b_mod;  // A/A' and B/A'
  Report report;            // columns and bottom row are central extensions
};
CentralizerRefinement centralizer_refinement(const SgSes& s);

// --- hom enumeration (finite instances) -------------------------------------

std::vector<SgMorphism> enumerate_sg_homs(const SquareGroup& a, const SquareGroup& m);
std::vector<Nil2Element> linear_elements(const SquareGroup& m);  // L(M) = {x : H(x)=0}
Report hom_count_checks(const SquareGroup& m);

// epi iff (hf = 0 implies h = 0), checked against finite targets
bool effective_epi_check(const SgMorphism& f, const std::vector<SquareGroup>& targets);

}  // namespace sqg
