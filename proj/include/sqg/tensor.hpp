#pragma once

// The tensor product of square groups:
//   (M (.) N)_e generated by x(.)y and central bilinear a(x-bar)b, subject to
//     (1) a(x-bar)b bilinear central          (2) x(.)(y1+y2) = x(.)y1 + x(.)y2
//     (3) (x1+x2)(.)y = x1(.)y + x2(.)y + (x2|x1)_H (x-bar) H(y)
//     (4) x(.)P(b) = (x|x)_H (x-bar) b        (5) P(a)(.)y = a (x-bar) Delta(y)
//     (6) T(a) (x-bar) T(b) = -a (x-bar) b
//   (M (.) N)_ee = M_ee tensor N_ee, P(a tensor b) = a (x-bar) b,
//   H(x(.)y) = (x|x)_H tensor H(y) + H(x) tensor Delta(y),
//   H(a (x-bar) b) = a tensor b - T(a) tensor T(b).
//
// The general algorithm presents M by a free square group and uses right
// exactness: M (.) N = coker(F1 (.) N -> F0 (.) N), with the closed-form
// carriers for V(n) (.) N and A-tensor (.) N as building blocks.

#include <functional>
#include <vector>

#include "sqg/sqcore.hpp"

namespace sqg {

struct TensorSymbol {
  enum Kind { Pair, Otimes } kind = Pair;
  Nil2Element x, y;  // Pair: x in left.e, y in right.e
  FgabElement a, b;  // Otimes: a in left.ee, b in right.ee
};
using SymbolCombo = std::vector<std::pair<Int, TensorSymbol>>;

struct TensorProduct {
  SquareGroup result;
  SquareGroup left, right;
  // image of (left mark i) (.) (right mark j) in result.e
  std::vector<std::vector<Nil2Element>> pair_dict;
  TensorAb ee_pair;   // left.ee tensor right.ee
  FgabHom ee_ident;   // ee_pair.group -> result.ee (an isomorphism)
  std::vector<SymbolCombo> symbols;  // per e-mark of the result

  FgabElement ee_elt(const FgabElement& a, const FgabElement& b) const;
  Nil2Element otbar(const FgabElement& a, const FgabElement& b) const;  // a (x-bar) b
  Nil2Element pair_mark(std::size_t i, std::size_t j) const { return pair_dict[i][j]; }
  // full evaluation of x (.) y
  Nil2Element odot(const Nil2Element& x, const Nil2Element& y) const;
  // left-linear version x |> y = x(.)y - H(x)(x-bar)TH(y)
  Nil2Element tr(const Nil2Element& x, const Nil2Element& y) const;
};

// dispatching constructor (unit shortcuts, closed forms, general algorithm)
TensorProduct tensor(const SquareGroup& m, const SquareGroup& n);
// free presentation + right exactness, no dispatch
TensorProduct tensor_general(const SquareGroup& m, const SquareGroup& n);

// closed forms
TensorProduct tensor_unit_left(const SquareGroup& n);    // znil (.) N = N
TensorProduct tensor_unit_right(const SquareGroup& m);   // M (.) znil = M
TensorProduct tensor_vn(std::size_t n, const SquareGroup& m);        // V(n) (.) M
TensorProduct tensor_atensor(const FgAbelianGroup& a, const SquareGroup& m);  // A^t (.) M
TensorProduct tensor_free(std::size_t s, std::size_t t, const SquareGroup& n);
TensorProduct tensor_zq(const SquareGroup& m);  // Z^Q (.) M carrier M_ee x M_e

bool is_znil_shape(const SquareGroup& m);

// morphism between square groups presented as free_sq(s,t), given the images
// of the s set-generators and the t ee-generators
SgMorphism free_sq_morphism(const SquareGroup& f, const SquareGroup& x,
                            const std::vector<Nil2Element>& e_targets,
                            const std::vector<FgabElement>& ee_targets);

// Morphism out of a computed tensor product, defined on formal symbols.
struct SymbolImages {
  std::function<Nil2Element(const Nil2Element&, const Nil2Element&)> on_pair;
  std::function<Nil2Element(const FgabElement&, const FgabElement&)> on_otimes;
  FgabHom fee;  // result.ee -> target.ee
};
SgMorphism induced_from_symbols(const TensorProduct& t, const SquareGroup& target,
                                const SymbolImages& im);

// f (.) g between computed tensors
SgMorphism tensor_morphism(const TensorProduct& src, const TensorProduct& dst,
                           const SgMorphism& f, const SgMorphism& g);

// relation re-checks on generator instances
Report tensor_relations_check(const TensorProduct& t);
Report tr_relations_check(const TensorProduct& t);   // left-linear presentation
Report sym_relations_check(const TensorProduct& t);  // symmetric presentation

// unit, symmetry, associativity
SgMorphism unit_left_iso(const TensorProduct& t);    // iota: znil (.) N -> N
SgMorphism unit_left_inv(const TensorProduct& t);    // N -> znil (.) N
SgMorphism unit_right_iso(const TensorProduct& t);   // kappa: M (.) znil -> M
SgMorphism unit_right_inv(const TensorProduct& t);   // M -> M (.) znil
SgMorphism symmetry_iso(const TensorProduct& mn, const TensorProduct& nm);

struct TensorTriple {
  TensorProduct ab, ab_c;  // A(.)B and (A(.)B)(.)C
  TensorProduct bc, a_bc;  // B(.)C and A(.)(B(.)C)
  SgMorphism assoc;        // (A(.)B)(.)C -> A(.)(B(.)C)
  SgMorphism assoc_inv;
  // triple-symbol evaluation x(.)y(.)z inside (A(.)B)(.)C
  Nil2Element triple(const Nil2Element& x, const Nil2Element& y, const Nil2Element& z) const;
  Nil2Element otimes3(const FgabElement& a, const FgabElement& b, const FgabElement& c) const;
};
TensorTriple triple_tensor(const SquareGroup& a, const SquareGroup& b, const SquareGroup& c);

Report verify_triangle(const SquareGroup& a, const SquareGroup& b);
Report verify_pentagon(const SquareGroup& a, const SquareGroup& b, const SquareGroup& c,
                       const SquareGroup& d);
Report verify_hexagons(const SquareGroup& a, const SquareGroup& b, const SquareGroup& c);

// closed-form cross-checks: construct the closed form and the explicit
// isomorphism to the general-algorithm output, verified on generators
Report check_tensor_atensor(const FgAbelianGroup& a, const SquareGroup& m);
Report check_tensor_zq(const SquareGroup& m);
Report check_tensor_vn(std::size_t n, const SquareGroup& m);
Report check_tensor_ab_sq(const SquareGroup& a, const SquareGroup& b);   // A abelian sq group
Report check_tensor_qz(const SquareGroup& a, const SquareGroup& b);      // + B quadratic Z-module
Report check_znil_monoidal(const std::vector<std::string>& s, const std::vector<std::string>& sp);

// bilinear maps and the universal property
struct BilinearMap {
  SquareGroup a, b, c;
  std::function<Nil2Element(const Nil2Element&, const Nil2Element&)> phi_l, phi_r;
  std::function<FgabElement(const FgabElement&, const FgabElement&)> phi_ee;
};
Report validate_bilinear(const BilinearMap& phi);
SgMorphism bilinear_factorize(const BilinearMap& phi, const TensorProduct& t);

// exactness instruments
SgMorphism sg_pairing(const SquareGroup& prod, const SgMorphism& f, const SgMorphism& g);
Report tensor_preserves_products(const SquareGroup& m, const SquareGroup& b, const SquareGroup& c);
Report tensor_right_exact(const SgSes& ses, const SquareGroup& m);
Report tensor_coproduct_sequence(const SquareGroup& m, const SquareGroup& a, const SquareGroup& b);
// A (.) mu is a monomorphism when A is projective
Report tensor_mono_projective(const SgSes& ses, const SquareGroup& a);

// naturality/compatibility properties
Report delta_multiplicativity(const TensorProduct& t);       // Delta_{MN} = Delta_M tensor Delta_N
Report n_star_tensor_compat(const TensorProduct& t, const Int& n);

}  // namespace sqg
