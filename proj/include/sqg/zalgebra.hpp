#pragma once

// Exact integer linear algebra and finitely generated abelian groups.
//
// Conventions: elements of Z^n are row vectors; a lattice is the row span of
// a basis matrix; homomorphisms act on the right (x -> x * M), so composition
// reads left to right via FgabHom::then.

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqg/ints.hpp"

namespace sqg {

struct SqgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntMatrix {
  std::size_t rows = 0, cols = 0;
  Vec a;  // row-major, rows*cols entries

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, Int(0)) {}
  IntMatrix(std::size_t r, std::size_t c, std::vector<std::vector<long long>> init);

  static IntMatrix identity(std::size_t n);
  static IntMatrix diag(const Vec& d);
  static IntMatrix from_rows(const std::vector<Vec>& rws, std::size_t ncols);

  Int& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const Int& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  Vec row(std::size_t i) const;
  void set_row(std::size_t i, const Vec& v);
  IntMatrix mul(const IntMatrix& o) const;
  IntMatrix transpose() const;
  IntMatrix vstack(const IntMatrix& o) const;
  bool is_zero() const;
  bool operator==(const IntMatrix& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
  std::string str() const;
};

Vec mul_row(const Vec& x, const IntMatrix& m);  // x * m

// Smith normal form: u*m*v = d, u and v unimodular, d diagonal with
// divisibility chain d1 | d2 | ... (nonnegative diagonal).
struct SnfResult {
  IntMatrix u, d, v, v_inv;
  Vec diagonal() const;
};
SnfResult smith_normal_form(const IntMatrix& m);

// Row-style Hermite normal form: u*m = h, u unimodular, h in row echelon
// form with positive pivots and entries above each pivot reduced into [0,p).
struct HnfResult {
  IntMatrix h, u;
  std::vector<std::size_t> pivot_col;  // size = rank
  std::size_t rank = 0;
  // Reduce v modulo the row span; optional combo receives c with
  // v - c*h_basis = result (c over the first `rank` rows of h).
  Vec reduce(const Vec& v, Vec* combo = nullptr) const;
  IntMatrix basis() const;  // first `rank` rows of h
};
HnfResult hermite_normal_form(const IntMatrix& m);
// Row-reduced lattice basis without tracking the transform (cheap for tall
// matrices such as accumulated relation lists).
IntMatrix hnf_basis_only(const IntMatrix& m);

// Basis (rows) of {x : x*m = 0}.
IntMatrix left_nullspace(const IntMatrix& m);
// Solve x*m = b; nullopt if unsolvable over Z.
std::optional<Vec> solve_left(const IntMatrix& m, const Vec& b);
// HNF basis of rowspan(a) + rowspan(b).
IntMatrix lattice_sum(const IntMatrix& a, const IntMatrix& b);
// Basis of {x : x*m in rowspan(l)}.
IntMatrix lattice_preimage(const IntMatrix& m, const IntMatrix& l);

class FgAbelianGroup;

struct FgabElement {
  FgAbelianGroup* owner_unused = nullptr;  // identity carried via group copy below
  // canonical coordinates, length = owner.rank(); torsion coords in [0, d)
  Vec coords;
  std::shared_ptr<const struct FgabData> data;

  FgabElement operator+(const FgabElement& o) const;
  FgabElement operator-(const FgabElement& o) const;
  FgabElement operator-() const;
  FgabElement scaled(const Int& c) const;
  bool operator==(const FgabElement& o) const;
  bool is_zero() const;
  std::string str() const;
};

struct FgabData;

class FgAbelianGroup {
 public:
  FgAbelianGroup();  // trivial group
  static FgAbelianGroup from_presentation(std::size_t gens, const IntMatrix& rels);
  static FgAbelianGroup from_factors(const Vec& factors);
  static FgAbelianGroup free(std::size_t n);

  std::size_t ngens() const;               // presentation generators
  const IntMatrix& rels() const;           // presentation relations
  const IntMatrix& to_can() const;         // ngens x rank
  const IntMatrix& from_can() const;       // rank x ngens
  const Vec& invariant_factors() const;    // nonunit torsion factors then zeros
  std::size_t rank() const;                // number of canonical coordinates
  std::size_t free_rank() const;
  bool is_trivial() const;
  bool is_finite() const;
  Int order() const;  // throws if infinite

  FgabElement element(Vec canonical_coords) const;
  FgabElement from_presentation_coords(const Vec& x) const;
  FgabElement zero() const;
  FgabElement pres_gen(std::size_t i) const;
  FgabElement canonical_gen(std::size_t i) const;
  std::vector<FgabElement> canonical_gens() const;

  bool same_shape(const FgAbelianGroup& o) const;  // equal invariant factors
  bool same_instance(const FgAbelianGroup& o) const;
  std::vector<FgabElement> enumerate() const;  // finite groups only

  // Express target as integer combination of `span` modulo torsion.
  std::optional<Vec> solve(const std::vector<FgabElement>& span, const FgabElement& target) const;
  bool in_span(const std::vector<FgabElement>& span, const FgabElement& target) const;

  std::string str() const;

  std::shared_ptr<const FgabData> data() const { return d_; }

 private:
  explicit FgAbelianGroup(std::shared_ptr<const FgabData> d) : d_(std::move(d)) {}
  std::shared_ptr<const FgabData> d_;
  friend struct FgabData;
};

class FgabHom {
 public:
  FgabHom() = default;
  // mat has src.rank() rows and dst.rank() cols; apply(x) = x*mat.
  FgabHom(FgAbelianGroup src, FgAbelianGroup dst, IntMatrix mat);
  static FgabHom identity(const FgAbelianGroup& g);
  static FgabHom zero(const FgAbelianGroup& src, const FgAbelianGroup& dst);
  // images given per presentation generator of src
  static FgabHom from_pres_images(const FgAbelianGroup& src, const FgAbelianGroup& dst,
                                  const std::vector<FgabElement>& images);
  static FgabHom from_gen_images(const FgAbelianGroup& src, const FgAbelianGroup& dst,
                                 const std::vector<FgabElement>& images);

  const FgAbelianGroup& src() const { return src_; }
  const FgAbelianGroup& dst() const { return dst_; }
  const IntMatrix& matrix() const { return mat_; }

  FgabElement apply(const FgabElement& x) const;
  FgabHom then(const FgabHom& g) const;  // first this, then g
  FgabHom plus(const FgabHom& g) const;
  FgabHom minus(const FgabHom& g) const;
  FgabHom negate() const;
  FgabHom scaled(const Int& c) const;

  bool is_zero() const;
  bool equals(const FgabHom& g) const;

  std::pair<FgAbelianGroup, FgabHom> kernel() const;    // (K, inclusion)
  std::pair<FgAbelianGroup, FgabHom> cokernel() const;  // (Q, projection)
  bool is_injective() const;
  bool is_surjective() const;
  bool is_iso() const;

 private:
  FgAbelianGroup src_, dst_;
  IntMatrix mat_;
};

// Inverse of an isomorphism.
FgabHom hom_inverse(const FgabHom& f);

// Quotient of g by the subgroup generated by `elems`; returns (Q, projection).
std::pair<FgAbelianGroup, FgabHom> quotient_by_elements(const FgAbelianGroup& g,
                                                        const std::vector<FgabElement>& elems);

struct DirectSum {
  FgAbelianGroup sum;
  std::vector<FgabHom> inject;   // parts -> sum
  std::vector<FgabHom> project;  // sum -> parts
};
DirectSum direct_sum(const std::vector<FgAbelianGroup>& parts);

// Classical tensor product with its canonical bilinear pairing.
struct TensorAb {
  FgAbelianGroup group;
  FgAbelianGroup left, right;
  FgabElement pair(const FgabElement& x, const FgabElement& y) const;
  // generator (i,j) of the tensor presentation
  FgabElement pres_pair(std::size_t i, std::size_t j) const;
};
TensorAb fgab_tensor(const FgAbelianGroup& a, const FgAbelianGroup& b);
// Hom induced on tensor products by f and g.
FgabHom tensor_hom(const TensorAb& src, const TensorAb& dst, const FgabHom& f, const FgabHom& g);

// Classical Tor_1 over Z, computed from the canonical free presentation of a.
FgAbelianGroup fgab_tor1(const FgAbelianGroup& a, const FgAbelianGroup& b);

// Chain complex ... -> C_1 -> C_0 with composite-zero boundaries.
class ChainComplexZ {
 public:
  // boundaries[i] : groups[i+1] -> groups[i]; validated composite-zero.
  ChainComplexZ(std::vector<FgAbelianGroup> groups, std::vector<FgabHom> boundaries);
  std::size_t length() const { return groups_.size(); }
  const FgAbelianGroup& group(std::size_t i) const { return groups_.at(i); }
  const FgabHom& boundary(std::size_t i) const { return boundaries_.at(i); }
  FgAbelianGroup homology(std::size_t degree) const;

 private:
  std::vector<FgAbelianGroup> groups_;
  std::vector<FgabHom> boundaries_;
};

FgAbelianGroup chain_homology(const ChainComplexZ& c, std::size_t degree);

// Symmetric square Sym^2(A) with projection from the tensor square.
struct Sym2Group {
  FgAbelianGroup base;
  TensorAb tensor_square;
  FgAbelianGroup group;  // Sym^2(base)
  FgabHom proj;          // tensor_square.group -> group
  FgabElement pair(const FgabElement& x, const FgabElement& y) const;
};
Sym2Group sym2(const FgAbelianGroup& a);

}  // namespace sqg
