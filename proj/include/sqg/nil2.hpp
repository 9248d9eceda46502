#pragma once

// Finitely generated nilpotence-class-2 groups as central-extension data.
//
// A Nil2Datum presents a group G on "lattice" generators g_0..g_{n-1} and a
// central abelian group C. Carrier: pairs (v, c) with v in the Hermite
// transversal of the relation lattice R and c in C. The element (v, c) is the
// ascending product g_0^{v_0} + ... + g_{n-1}^{v_{n-1}} + c. Multiplication
// twists the central part by the bilinear cocycle beta; reduction modulo R
// twists by the correction map rho. Invariants:
//   (CN1) lambda(r, e_i) = 0 in C for every relation r  (relations central),
//   (CN2) rho(r + r') = rho(r) + rho(r') + beta(r, r'),
//   (CN3) lambda(u, v) = beta(u, v) - beta(v, u) is alternating.
// All group generators ("marks") are the lattice generators followed by the
// canonical generators of C.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sqg/report.hpp"
#include "sqg/zalgebra.hpp"

namespace sqg {

class Nil2Datum;

struct Nil2Element {
  std::shared_ptr<const struct Nil2Data> data;
  Vec v;          // transversal representative in Z^rank
  FgabElement c;  // central part

  bool operator==(const Nil2Element& o) const { return v == o.v && c == o.c; }
  bool is_identity() const;
  std::string str() const;
};

using SparseForm = std::map<std::pair<std::size_t, std::size_t>, FgabElement>;

struct Nil2Data;

class Nil2Datum {
 public:
  Nil2Datum();  // trivial group
  // rel rows span the relation lattice; rho entries correspond to rel rows.
  Nil2Datum(std::size_t rank, const IntMatrix& rel, FgAbelianGroup central,
            std::vector<FgabElement> rho, SparseForm beta);

  static Nil2Datum free_nil2(std::size_t n);  // C = Lambda^2 Z^n
  static Nil2Datum from_abelian(const FgAbelianGroup& a);  // lattice presentation, C = 0

  std::size_t rank() const;
  const IntMatrix& rel_basis() const;  // HNF basis rows of R
  const FgAbelianGroup& central() const;
  const FgabElement& rho_basis(std::size_t k) const;  // correction of basis row k
  const SparseForm& beta() const;

  std::size_t nmarks() const;          // rank + central.rank()
  Nil2Element mark(std::size_t i) const;
  std::vector<Nil2Element> marks() const;
  Vec mark_coords(const Nil2Element& x) const;  // [v | c-coords], length nmarks
  const FgAbelianGroup& abelianization() const;
  FgabElement ab_class(const Nil2Element& x) const;

  Nil2Element identity() const;
  Nil2Element element(Vec v_raw, FgabElement c) const;  // normalizes
  Nil2Element lattice_elt(const Vec& v_raw) const;
  Nil2Element central_elt(const FgabElement& c) const;
  Nil2Element mul(const Nil2Element& a, const Nil2Element& b) const;
  Nil2Element inv(const Nil2Element& a) const;
  Nil2Element sub(const Nil2Element& a, const Nil2Element& b) const;  // a + (-b)
  Nil2Element scaled(const Int& n, const Nil2Element& a) const;
  Nil2Element commutator(const Nil2Element& a, const Nil2Element& b) const;
  // product of marks^exponents in mark order (lattice ascending, then central)
  Nil2Element from_mark_coords(const Vec& coords) const;

  FgabElement beta_vec(const Vec& u, const Vec& w) const;
  FgabElement lambda_vec(const Vec& u, const Vec& w) const;
  FgabElement rho_of(const Vec& r) const;  // r must lie in R

  bool is_central(const Nil2Element& x) const;
  bool is_trivial_group() const;
  bool is_finite() const;
  Int order() const;
  std::vector<Nil2Element> enumerate() const;

  Report validate() const;  // CN1-CN3

  bool same_instance(const Nil2Datum& o) const { return d_ == o.d_; }
  std::shared_ptr<const Nil2Data> data() const { return d_; }
  std::string str() const;

 private:
  explicit Nil2Datum(std::shared_ptr<const Nil2Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Nil2Data> d_;
  friend struct Nil2Data;
};

// Homomorphism given by images of all marks.
class Nil2Hom {
 public:
  Nil2Hom() = default;
  Nil2Hom(Nil2Datum src, Nil2Datum dst, std::vector<Nil2Element> mark_images);
  static Nil2Hom identity(const Nil2Datum& g);
  static Nil2Hom constant_trivial(const Nil2Datum& src, const Nil2Datum& dst);

  const Nil2Datum& src() const { return src_; }
  const Nil2Datum& dst() const { return dst_; }
  const std::vector<Nil2Element>& images() const { return images_; }

  Nil2Element apply(const Nil2Element& x) const;
  Nil2Hom then(const Nil2Hom& g) const;
  Report validate() const;  // relations preserved
  bool equals(const Nil2Hom& o) const;

 private:
  Nil2Datum src_, dst_;
  std::vector<Nil2Element> images_;
};

// Subgroup of a Nil2Datum generated by a list of elements.
struct Nil2Subgroup {
  Nil2Datum owner;
  std::vector<Nil2Element> gens;

  bool contains(const Nil2Element& x) const;
  bool is_normal() const;  // [G, S] inside S
};

// Quadratic map on a Nil2Datum: generator values plus sparse cross-effect on
// mark pairs. The cross-effect must factor through the abelianization.
class QuadraticMap {
 public:
  QuadraticMap() = default;
  QuadraticMap(Nil2Datum src, FgAbelianGroup dst, std::vector<FgabElement> values, SparseForm phi);
  static QuadraticMap zero(const Nil2Datum& src, const FgAbelianGroup& dst);

  const Nil2Datum& src() const { return src_; }
  const FgAbelianGroup& dst() const { return dst_; }
  const std::vector<FgabElement>& values() const { return values_; }
  const SparseForm& phi() const { return phi_; }

  FgabElement value(std::size_t mark) const { return values_.at(mark); }
  FgabElement phi_at(std::size_t i, std::size_t j) const;
  // bilinear extension of phi over raw mark-coordinate vectors
  FgabElement phi_form(const Vec& x, const Vec& y) const;
  FgabElement cross(const Nil2Element& x, const Nil2Element& y) const;
  FgabElement eval(const Nil2Element& x) const;
  // free quadratic formula on a raw mark-coordinate vector (no reduction)
  FgabElement eval_word(const Vec& coords) const;

  Report validate() const;  // descends to the group: vanishes on all relators

 private:
  Nil2Datum src_;
  FgAbelianGroup dst_;
  std::vector<FgabElement> values_;
  SparseForm phi_;
};

// Validation entry point mirroring the datum invariants CN1-CN3.
Report validate_nil2(const Nil2Datum& d);

// A quadratic map on a free cover descends to the quotient by the given
// relators iff it vanishes on each of them; returns the first witness.
bool quad_descends(const QuadraticMap& f, const std::vector<Nil2Element>& relators,
                   std::string* witness = nullptr);

// --- free nil2 groups with named generators and textual normal forms -------

struct Nil2NormalForm {
  // exponents of generators, and of commutators [i,j] for i<j (lex order)
  Vec linear;
  std::map<std::pair<std::size_t, std::size_t>, Int> commutator;
  std::string str(const std::vector<std::string>& names) const;
};

class FreeNil2Group {
 public:
  explicit FreeNil2Group(std::vector<std::string> generator_names);
  const std::vector<std::string>& names() const { return names_; }
  const Nil2Datum& datum() const { return datum_; }
  std::size_t gen_index(const std::string& name) const;

  // word letters: +index / -index encoded as (index, sign)
  using Letter = std::pair<std::size_t, int>;
  Nil2Element reduce_word(const std::vector<Letter>& word) const;
  Nil2NormalForm normal_form(const Nil2Element& x) const;
  Nil2Element parse_word(const std::string& text) const;  // e.g. "x y -x"

 private:
  std::vector<std::string> names_;
  Nil2Datum datum_;
};

// Coproduct in Nil of two datums whose central generators all have trivial
// abelianization class. Returns the datum plus the two injections.
struct Nil2Coproduct {
  Nil2Datum group;
  Nil2Hom inj_left, inj_right;
  // index of the left/right lattice blocks and the pairing block in C
  FgAbelianGroup pairing;  // G^ab tensor H^ab
  FgabHom pairing_into_central;
};
Nil2Coproduct nil2_coproduct(const Nil2Datum& g, const Nil2Datum& h);

// Quotient of a datum by the normal closure of the given elements.
struct Nil2Quotient {
  Nil2Datum group;
  Nil2Hom proj;
};
Nil2Quotient quotient_datum(const Nil2Datum& g, const std::vector<Nil2Element>& kill);

// Kernel generators of a homomorphism (as elements of the source).
std::vector<Nil2Element> hom_kernel_gens(const Nil2Hom& f);
bool hom_is_surjective(const Nil2Hom& f);
bool hom_is_injective(const Nil2Hom& f);

}  // namespace sqg
