#pragma once

// The composition product. For a group G and a square group M, the group
// G (x) M is generated by g(x)x and [g,h](x)a subject to
//   (g+h)(x)x = g(x)x + h(x)x + [g,h](x)H(x),   [g,g](x)a = g(x)P(a),
// with g(x)x linear in x and [g,h](x)a central, linear in each variable.
// The box product M [] N has e-level M_e (x) N / ([x,Pa](x)c ~ 0) and
// ee-level (M_ee ten Coker P_N  +  Coker P_M ten Coker P_M ten N_ee) divided
// by (x|y)_H ten z ~ ybar ten xbar ten Delta(z).

#include "sqg/sqcore.hpp"
#include "sqg/tensor.hpp"

namespace sqg {

struct PreSquareGroup {
  Nil2Datum e;
  FgAbelianGroup ee;
  FgabHom t;                       // involution on ee
  SparseForm bracket;              // {x,y} on mark pairs
  std::vector<Nil2Element> pvals;  // P per ee canonical generator

  Nil2Element apply_p(const FgabElement& a) const;
  FgabElement bracket_form(const Vec& x, const Vec& y) const;
  FgabElement bracket_elts(const Nil2Element& x, const Nil2Element& y) const;
  Report validate() const;  // PT=P, T{x,y}+{y,x}=0, P{x,y}=[x,y], {x,Pa}=0
  bool equals(const PreSquareGroup& o) const;
};

PreSquareGroup psg_forget(const SquareGroup& m);
// Lemma-style converse: supplying H back yields the original square group iff
// {x,y} = (x|y)_H and Id + T = HP
Report psg_roundtrip_check(const SquareGroup& m);
// the PSG endomorphism of p(M) with e-level x -> nx + binom(n,2) PH(x) and
// ee-level multiplication by n^2; it is built from the square group since the
// e-level formula needs H
Nil2Hom n_star_psg(const SquareGroup& m, const Int& n);
Report n_star_psg_checks(const SquareGroup& m, const Int& n);

// --- G (x) M -----------------------------------------------------------------

struct GroupTensor {
  Nil2Datum group;
  Nil2Datum src;   // G
  SquareGroup m;
  // slot dictionary: g-mark k (x) m-mark j
  std::vector<std::vector<Nil2Element>> slot;
  // [u, v] (x) a, bilinear in the mark-coordinate vectors of G
  std::function<Nil2Element(const Vec&, const Vec&, const FgabElement&)> comm_block;
  // g (x) x for arbitrary elements
  Nil2Element tensor_elt(const Nil2Element& g, const Nil2Element& x) const;
};
GroupTensor group_tensor(const Nil2Datum& g, const SquareGroup& m);
// four-term cross-effect sequence on a coproduct of small nil2 groups
Report group_tensor_cross_effect(const Nil2Datum& x, const Nil2Datum& y, const SquareGroup& m);

// --- box product -------------------------------------------------------------

struct BoxProduct {
  SquareGroup result;
  SquareGroup left, right;
  // dictionaries
  std::vector<std::vector<Nil2Element>> pair_dict;  // left mark (x) right mark
  std::function<Nil2Element(const Vec&, const Vec&, const FgabElement&)> comm_block;
  Nil2Element box_elt(const Nil2Element& x, const Nil2Element& z) const;
  // ee blocks: a ten zbar and xbar ten ybar ten c
  TensorAb b1;             // M_ee ten CokP_N
  TensorAb cokk;           // CokP_M ten CokP_M
  TensorAb b2;             // (CokP_M ten CokP_M) ten N_ee
  FgabHom b1_into, b2_into;  // blocks -> result.ee
  FgabElement ee_b1(const FgabElement& a, const FgabElement& zbar) const;
  FgabElement ee_b2(const FgabElement& xbar, const FgabElement& ybar, const FgabElement& c) const;
};
BoxProduct box(const SquareGroup& m, const SquareGroup& n);
Report box_relations_check(const BoxProduct& b);
// functoriality: f [] g between computed box products
SgMorphism box_morphism(const BoxProduct& src, const BoxProduct& dst, const SgMorphism& f,
                        const SgMorphism& g);
// naturality of sigma in both variables
Report sigma_naturality(const SgMorphism& f, const SgMorphism& g);

// two-sided unit checks with explicit isomorphisms
Report box_unit_left(const SquareGroup& m);   // znil [] M = M
Report box_unit_right(const SquareGroup& m);  // M [] znil = M

// pre-square-group box product and the forgetful compatibility
struct PsgBox {
  PreSquareGroup result;
  PreSquareGroup left;
  SquareGroup right;
};
PsgBox box_psg(const PreSquareGroup& m, const SquareGroup& n);
Report psg_box_compat(const SquareGroup& m, const SquareGroup& n);  // p(M[]N) = p(M)[]N

// --- sigma: M [] N -> M (.) N -------------------------------------------------

SgMorphism sigma(const BoxProduct& b, const TensorProduct& t);
Report sigma_checks(const SquareGroup& m, const SquareGroup& n);  // valid + formulas
bool sigma_is_iso(const SquareGroup& m, const SquareGroup& n);
// lax-monoidal coherence: the associativity square on a triple
Report sigma_lax_square(const SquareGroup& a, const SquareGroup& b, const SquareGroup& c);

// --- Gamma models -------------------------------------------------------------

struct GammaModel {
  std::size_t points;  // non-basepoint count
  PreSquareGroup m;
  Nil2Datum group;
  std::vector<std::vector<Nil2Element>> slot;  // s (.) m-mark
  std::function<Nil2Element(std::size_t, std::size_t, const FgabElement&)> bracket_slot;
  Nil2Element eval(std::size_t s, const Nil2Element& x) const;  // s (.) x
};
GammaModel gamma_model(std::size_t points, const PreSquareGroup& m);
// functoriality along a pointed map (0 = basepoint): images of non-base points
Nil2Hom gamma_map(const GammaModel& src, const GammaModel& dst,
                  const std::vector<std::size_t>& images);
Report gamma_model_checks(const PreSquareGroup& m);
// S (.) p(M) = <S> (x) M naturally
Report gamma_vs_group_tensor(std::size_t points, const SquareGroup& m);

}  // namespace sqg
