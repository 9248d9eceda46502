#include "sqg/nil2.hpp"

#include <algorithm>
#include <sstream>

namespace sqg {

struct Nil2Data {
  std::size_t rank = 0;
  IntMatrix rel_input;  // original relation rows
  HnfResult rel_hnf;    // HNF of rel_input
  IntMatrix rel_basis;  // rel_hnf basis rows
  FgAbelianGroup central;
  std::vector<FgabElement> rho_basis;  // per basis row
  SparseForm beta;
  FgAbelianGroup ab;  // abelianization on rank + central.rank() generators
};

namespace {

FgabElement beta_vec_impl(const Nil2Data& d, const Vec& u, const Vec& w) {
  FgabElement acc = d.central.zero();
  for (const auto& [ij, val] : d.beta) {
    const Int& x = u[ij.first];
    if (x == 0) continue;
    const Int& y = w[ij.second];
    if (y == 0) continue;
    acc = acc + val.scaled(x * y);
  }
  return acc;
}

// rho(sum_k z_k * rows_k) via rho(a+b) = rho(a) + rho(b) + beta(a, b)
FgabElement fold_rho(const Nil2Data& d, const IntMatrix& rows,
                     const std::vector<FgabElement>& rhos, const Vec& z) {
  FgabElement acc_rho = d.central.zero();
  Vec acc_v(d.rank, Int(0));
  for (std::size_t k = 0; k < rows.rows; ++k) {
    if (z[k] == 0) continue;
    Vec rk = rows.row(k);
    FgabElement term = rhos[k].scaled(z[k]) + beta_vec_impl(d, rk, rk).scaled(binom2(z[k]));
    Vec zrk = scale_vec(z[k], rk);
    acc_rho = acc_rho + term + beta_vec_impl(d, acc_v, zrk);
    acc_v = add_vec(acc_v, zrk);
  }
  return acc_rho;
}

std::shared_ptr<const Nil2Data> make_nil2_data(std::size_t rank, const IntMatrix& rel,
                                               FgAbelianGroup central,
                                               std::vector<FgabElement> rho, SparseForm beta) {
  auto d = std::make_shared<Nil2Data>();
  d->rank = rank;
  d->rel_input = rel.rows ? rel : IntMatrix(0, rank);
  if (d->rel_input.cols != rank) throw SqgError("Nil2Datum: relation width mismatch");
  if (rho.size() != d->rel_input.rows) throw SqgError("Nil2Datum: one rho entry per relation row");
  d->central = std::move(central);
  d->beta = std::move(beta);
  for (auto it = d->beta.begin(); it != d->beta.end();) {
    if (it->first.first >= rank || it->first.second >= rank) throw SqgError("Nil2Datum: beta index");
    if (it->second.is_zero())
      it = d->beta.erase(it);
    else
      ++it;
  }
  d->rel_hnf = hermite_normal_form(d->rel_input);
  d->rel_basis = d->rel_hnf.basis();
  // corrections for the HNF basis rows: basis row k = u[k] * rel_input
  d->rho_basis.clear();
  for (std::size_t k = 0; k < d->rel_basis.rows; ++k) {
    Vec z = d->rel_hnf.u.row(k);
    d->rho_basis.push_back(fold_rho(*d, d->rel_input, rho, z));
  }
  // consistency of the supplied corrections on dependent rows
  for (std::size_t i = 0; i < d->rel_input.rows; ++i) {
    Vec combo;
    Vec res = d->rel_hnf.reduce(d->rel_input.row(i), &combo);
    if (!is_zero_vec(res)) throw SqgError("Nil2Datum: HNF reduction failed");
    FgabElement expect = fold_rho(*d, d->rel_basis, d->rho_basis, combo);
    if (!(expect == rho[i]))
      throw SqgError("Nil2Datum: inconsistent relation corrections at row " + std::to_string(i));
  }
  // abelianization
  std::size_t nm = rank + d->central.rank();
  std::vector<Vec> abrels;
  for (std::size_t k = 0; k < d->rel_basis.rows; ++k) {
    // the raw pair (r, rho(r)) is the identity: word(r) + central(rho) = 0
    Vec row(nm, Int(0));
    for (std::size_t j = 0; j < rank; ++j) row[j] = d->rel_basis.at(k, j);
    for (std::size_t m = 0; m < d->central.rank(); ++m) row[rank + m] = d->rho_basis[k].coords[m];
    abrels.push_back(row);
  }
  for (std::size_t i = 0; i < rank; ++i)
    for (std::size_t j = i + 1; j < rank; ++j) {
      Vec ei(rank, Int(0)), ej(rank, Int(0));
      ei[i] = 1;
      ej[j] = 1;
      FgabElement lam = beta_vec_impl(*d, ei, ej) - beta_vec_impl(*d, ej, ei);
      if (lam.is_zero()) continue;
      Vec row(nm, Int(0));
      for (std::size_t m = 0; m < d->central.rank(); ++m) row[rank + m] = lam.coords[m];
      abrels.push_back(row);
    }
  const Vec& cf = d->central.invariant_factors();
  for (std::size_t m = 0; m < d->central.rank(); ++m)
    if (cf[m] > 0) {
      Vec row(nm, Int(0));
      row[rank + m] = cf[m];
      abrels.push_back(row);
    }
  d->ab = FgAbelianGroup::from_presentation(nm, IntMatrix::from_rows(abrels, nm));
  return d;
}

}  // namespace

bool Nil2Element::is_identity() const { return is_zero_vec(v) && c.is_zero(); }

std::string Nil2Element::str() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ";" << c.str() << ")";
  return os.str();
}

Nil2Datum::Nil2Datum()
    : d_(make_nil2_data(0, IntMatrix(0, 0), FgAbelianGroup(), {}, {})) {}

Nil2Datum::Nil2Datum(std::size_t rank, const IntMatrix& rel, FgAbelianGroup central,
                     std::vector<FgabElement> rho, SparseForm beta)
    : d_(make_nil2_data(rank, rel, std::move(central), std::move(rho), std::move(beta))) {}

Nil2Datum Nil2Datum::free_nil2(std::size_t n) {
  FgAbelianGroup c = FgAbelianGroup::free(n * (n - 1) / 2);
  SparseForm beta;
  // pair (i,j), i<j, has index at position counting lex pairs
  auto pair_index = [n](std::size_t i, std::size_t j) {
    // i<j
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      // beta(e_i, e_j) = [g_i, g_j] = -(basis e_{(j,i)}) for i > j
      Vec cc(c.rank(), Int(0));
      cc[pair_index(j, i)] = -1;
      beta[{i, j}] = c.element(cc);
    }
  return Nil2Datum(n, IntMatrix(0, n), c, {}, beta);
}

Nil2Datum Nil2Datum::from_abelian(const FgAbelianGroup& a) {
  std::vector<Vec> rows;
  const Vec& f = a.invariant_factors();
  for (std::size_t i = 0; i < a.rank(); ++i)
    if (f[i] > 0) {
      Vec r(a.rank(), Int(0));
      r[i] = f[i];
      rows.push_back(r);
    }
  FgAbelianGroup triv;
  std::vector<FgabElement> rho(rows.size(), triv.zero());
  return Nil2Datum(a.rank(), IntMatrix::from_rows(rows, a.rank()), triv, rho, {});
}

std::size_t Nil2Datum::rank() const { return d_->rank; }
const IntMatrix& Nil2Datum::rel_basis() const { return d_->rel_basis; }
const FgAbelianGroup& Nil2Datum::central() const { return d_->central; }
const FgabElement& Nil2Datum::rho_basis(std::size_t k) const { return d_->rho_basis.at(k); }
const SparseForm& Nil2Datum::beta() const { return d_->beta; }

std::size_t Nil2Datum::nmarks() const { return d_->rank + d_->central.rank(); }

Nil2Element Nil2Datum::mark(std::size_t i) const {
  if (i < d_->rank) {
    Vec v(d_->rank, Int(0));
    v[i] = 1;
    return lattice_elt(v);
  }
  return central_elt(d_->central.canonical_gen(i - d_->rank));
}

std::vector<Nil2Element> Nil2Datum::marks() const {
  std::vector<Nil2Element> out;
  for (std::size_t i = 0; i < nmarks(); ++i) out.push_back(mark(i));
  return out;
}

Vec Nil2Datum::mark_coords(const Nil2Element& x) const {
  Vec out(nmarks(), Int(0));
  for (std::size_t i = 0; i < d_->rank; ++i) out[i] = x.v[i];
  for (std::size_t m = 0; m < d_->central.rank(); ++m) out[d_->rank + m] = x.c.coords[m];
  return out;
}

const FgAbelianGroup& Nil2Datum::abelianization() const { return d_->ab; }

FgabElement Nil2Datum::ab_class(const Nil2Element& x) const {
  return d_->ab.from_presentation_coords(mark_coords(x));
}

Nil2Element Nil2Datum::identity() const {
  Nil2Element e;
  e.data = d_;
  e.v = Vec(d_->rank, Int(0));
  e.c = d_->central.zero();
  return e;
}

Nil2Element Nil2Datum::element(Vec v_raw, FgabElement c) const {
  Vec combo;
  Vec v = d_->rel_hnf.reduce(v_raw, &combo);
  FgabElement rho_r = fold_rho(*d_, d_->rel_basis, d_->rho_basis, combo);
  Vec r = sub_vec(v_raw, v);
  Nil2Element e;
  e.data = d_;
  e.v = std::move(v);
  e.c = c - rho_r - beta_vec_impl(*d_, e.v, r);
  return e;
}

Nil2Element Nil2Datum::lattice_elt(const Vec& v_raw) const { return element(v_raw, d_->central.zero()); }

Nil2Element Nil2Datum::central_elt(const FgabElement& c) const {
  Nil2Element e;
  e.data = d_;
  e.v = Vec(d_->rank, Int(0));
  e.c = c;
  return e;
}

Nil2Element Nil2Datum::mul(const Nil2Element& a, const Nil2Element& b) const {
  return element(add_vec(a.v, b.v), a.c + b.c + beta_vec_impl(*d_, a.v, b.v));
}

Nil2Element Nil2Datum::inv(const Nil2Element& a) const {
  return element(neg_vec(a.v), -a.c + beta_vec_impl(*d_, a.v, a.v));
}

Nil2Element Nil2Datum::sub(const Nil2Element& a, const Nil2Element& b) const {
  return mul(a, inv(b));
}

Nil2Element Nil2Datum::scaled(const Int& n, const Nil2Element& a) const {
  return element(scale_vec(n, a.v), a.c.scaled(n) + beta_vec_impl(*d_, a.v, a.v).scaled(binom2(n)));
}

Nil2Element Nil2Datum::commutator(const Nil2Element& a, const Nil2Element& b) const {
  return central_elt(lambda_vec(a.v, b.v));
}

Nil2Element Nil2Datum::from_mark_coords(const Vec& coords) const {
  Vec v(d_->rank);
  for (std::size_t i = 0; i < d_->rank; ++i) v[i] = coords[i];
  Vec cc(d_->central.rank());
  for (std::size_t m = 0; m < d_->central.rank(); ++m) cc[m] = coords[d_->rank + m];
  return mul(lattice_elt(v), central_elt(d_->central.element(cc)));
}

FgabElement Nil2Datum::beta_vec(const Vec& u, const Vec& w) const { return beta_vec_impl(*d_, u, w); }

FgabElement Nil2Datum::lambda_vec(const Vec& u, const Vec& w) const {
  return beta_vec_impl(*d_, u, w) - beta_vec_impl(*d_, w, u);
}

FgabElement Nil2Datum::rho_of(const Vec& r) const {
  Vec combo;
  Vec res = d_->rel_hnf.reduce(r, &combo);
  if (!is_zero_vec(res)) throw SqgError("rho_of: vector not in relation lattice");
  return fold_rho(*d_, d_->rel_basis, d_->rho_basis, combo);
}

bool Nil2Datum::is_central(const Nil2Element& x) const {
  for (std::size_t i = 0; i < d_->rank; ++i) {
    Vec ei(d_->rank, Int(0));
    ei[i] = 1;
    if (!lambda_vec(x.v, ei).is_zero()) return false;
  }
  return true;
}

bool Nil2Datum::is_trivial_group() const {
  if (!d_->central.is_trivial()) return false;
  // lattice quotient trivial: every unit vector reduces to zero
  for (std::size_t i = 0; i < d_->rank; ++i) {
    Vec ei(d_->rank, Int(0));
    ei[i] = 1;
    if (!is_zero_vec(d_->rel_hnf.reduce(ei))) return false;
  }
  return true;
}

bool Nil2Datum::is_finite() const {
  return d_->rel_hnf.rank == d_->rank && d_->central.is_finite();
}

Int Nil2Datum::order() const {
  if (!is_finite()) throw SqgError("order: infinite nil2 group");
  Int n = d_->central.order();
  for (std::size_t k = 0; k < d_->rel_hnf.rank; ++k)
    n *= d_->rel_basis.at(k, d_->rel_hnf.pivot_col[k]);
  return n;
}

std::vector<Nil2Element> Nil2Datum::enumerate() const {
  if (!is_finite()) throw SqgError("enumerate: infinite nil2 group");
  std::vector<Nil2Element> out;
  Vec diag(d_->rank);
  for (std::size_t k = 0; k < d_->rank; ++k) diag[k] = d_->rel_basis.at(k, d_->rel_hnf.pivot_col[k]);
  std::vector<FgabElement> cs = d_->central.enumerate();
  Vec v(d_->rank, Int(0));
  for (;;) {
    for (const auto& c : cs) {
      Nil2Element e;
      e.data = d_;
      e.v = v;
      e.c = c;
      out.push_back(e);
    }
    std::size_t i = 0;
    for (; i < d_->rank; ++i) {
      v[i] += 1;
      if (v[i] < diag[i]) break;
      v[i] = 0;
    }
    if (i == d_->rank) break;
  }
  return out;
}

Report Nil2Datum::validate() const {
  Report rep;
  // CN1: relations are central
  for (std::size_t k = 0; k < d_->rel_basis.rows; ++k)
    for (std::size_t i = 0; i < d_->rank; ++i) {
      Vec ei(d_->rank, Int(0));
      ei[i] = 1;
      FgabElement lam = lambda_vec(d_->rel_basis.row(k), ei);
      if (!lam.is_zero()) {
        rep.fail("CN1", "relation row " + std::to_string(k) + " vs generator " + std::to_string(i));
        return rep;
      }
    }
  rep.pass("CN1");
  // CN2: rho is additive with beta twist on basis pairs
  bool cn2 = true;
  for (std::size_t k = 0; k < d_->rel_basis.rows && cn2; ++k)
    for (std::size_t l = 0; l < d_->rel_basis.rows && cn2; ++l) {
      Vec r = d_->rel_basis.row(k), s = d_->rel_basis.row(l);
      FgabElement lhs = rho_of(add_vec(r, s));
      FgabElement rhs = rho_of(r) + rho_of(s) + beta_vec(r, s);
      if (!(lhs == rhs)) {
        rep.fail("CN2", "rows " + std::to_string(k) + "," + std::to_string(l));
        cn2 = false;
      }
    }
  if (cn2) rep.pass("CN2");
  // CN3: lambda alternating
  bool cn3 = true;
  for (std::size_t i = 0; i < d_->rank && cn3; ++i) {
    Vec ei(d_->rank, Int(0));
    ei[i] = 1;
    if (!lambda_vec(ei, ei).is_zero()) {
      rep.fail("CN3", "generator " + std::to_string(i));
      cn3 = false;
    }
  }
  if (cn3) rep.pass("CN3");
  return rep;
}

std::string Nil2Datum::str() const {
  std::ostringstream os;
  os << "nil2(rank " << d_->rank << ", rel " << d_->rel_basis.rows << ", C " << d_->central.str()
     << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Nil2Hom
// ---------------------------------------------------------------------------

Nil2Hom::Nil2Hom(Nil2Datum src, Nil2Datum dst, std::vector<Nil2Element> mark_images)
    : src_(std::move(src)), dst_(std::move(dst)), images_(std::move(mark_images)) {
  if (images_.size() != src_.nmarks()) throw SqgError("Nil2Hom: one image per mark");
}

Nil2Hom Nil2Hom::identity(const Nil2Datum& g) { return Nil2Hom(g, g, g.marks()); }

Nil2Hom Nil2Hom::constant_trivial(const Nil2Datum& src, const Nil2Datum& dst) {
  return Nil2Hom(src, dst, std::vector<Nil2Element>(src.nmarks(), dst.identity()));
}

Nil2Element Nil2Hom::apply(const Nil2Element& x) const {
  Nil2Element acc = dst_.identity();
  for (std::size_t i = 0; i < src_.rank(); ++i)
    if (x.v[i] != 0) acc = dst_.mul(acc, dst_.scaled(x.v[i], images_[i]));
  for (std::size_t m = 0; m < src_.central().rank(); ++m)
    if (x.c.coords[m] != 0)
      acc = dst_.mul(acc, dst_.scaled(x.c.coords[m], images_[src_.rank() + m]));
  return acc;
}

Nil2Hom Nil2Hom::then(const Nil2Hom& g) const {
  std::vector<Nil2Element> imgs;
  for (const auto& im : images_) imgs.push_back(g.apply(im));
  return Nil2Hom(src_, g.dst(), imgs);
}

Report Nil2Hom::validate() const {
  Report rep;
  const Nil2Datum& S = src_;
  auto word_image = [&](const Vec& coords) {
    Nil2Element acc = dst_.identity();
    for (std::size_t i = 0; i < S.nmarks(); ++i)
      if (coords[i] != 0) acc = dst_.mul(acc, dst_.scaled(coords[i], images_[i]));
    return acc;
  };
  bool ok = true;
  for (std::size_t k = 0; k < S.rel_basis().rows && ok; ++k) {
    Vec w(S.nmarks(), Int(0));
    for (std::size_t j = 0; j < S.rank(); ++j) w[j] = S.rel_basis().at(k, j);
    Vec c(S.nmarks(), Int(0));
    for (std::size_t m = 0; m < S.central().rank(); ++m)
      c[S.rank() + m] = S.rho_basis(k).coords[m];
    // word(r) + central(rho) must map to the identity
    if (!dst_.mul(word_image(w), word_image(c)).is_identity()) {
      rep.fail("hom-relations", "relation row " + std::to_string(k));
      ok = false;
    }
  }
  if (ok) rep.pass("hom-relations");
  ok = true;
  for (std::size_t i = 0; i < S.rank() && ok; ++i)
    for (std::size_t j = i + 1; j < S.rank() && ok; ++j) {
      Vec ei(S.rank(), Int(0)), ej(S.rank(), Int(0));
      ei[i] = 1;
      ej[j] = 1;
      FgabElement lam = S.lambda_vec(ei, ej);
      Vec c(S.nmarks(), Int(0));
      for (std::size_t m = 0; m < S.central().rank(); ++m) c[S.rank() + m] = lam.coords[m];
      Nil2Element rhs = word_image(c);
      Nil2Element lhs = dst_.sub(dst_.mul(images_[i], images_[j]),
                                 dst_.mul(images_[j], images_[i]));
      // [a,b] = -a-b+a+b ; computed as (a+b) - (b+a)
      if (!(lhs == rhs)) {
        rep.fail("hom-commutators", "pair " + std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
    }
  if (ok) rep.pass("hom-commutators");
  ok = true;
  for (std::size_t m = 0; m < S.central().rank() && ok; ++m)
    for (std::size_t t = 0; t < S.nmarks() && ok; ++t) {
      Nil2Element zc = images_[S.rank() + m];
      Nil2Element other = images_[t];
      Nil2Element comm = dst_.sub(dst_.mul(zc, other), dst_.mul(other, zc));
      if (!comm.is_identity()) {
        rep.fail("hom-centrality", "central " + std::to_string(m) + " vs mark " + std::to_string(t));
        ok = false;
      }
    }
  if (ok) rep.pass("hom-centrality");
  ok = true;
  const Vec& cf = S.central().invariant_factors();
  for (std::size_t m = 0; m < S.central().rank() && ok; ++m) {
    if (cf[m] == 0) continue;
    if (!dst_.scaled(cf[m], images_[S.rank() + m]).is_identity()) {
      rep.fail("hom-torsion", "central generator " + std::to_string(m));
      ok = false;
    }
  }
  if (ok) rep.pass("hom-torsion");
  return rep;
}

bool Nil2Hom::equals(const Nil2Hom& o) const {
  if (images_.size() != o.images_.size()) return false;
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (!(images_[i] == o.images_[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Subgroups
// ---------------------------------------------------------------------------

namespace {

struct SubgroupCtx {
  std::vector<Vec> vrows;            // lattice parts of the generators
  std::vector<FgabElement> dspan;    // central defect span
};

SubgroupCtx subgroup_ctx(const Nil2Datum& g, const std::vector<Nil2Element>& gens) {
  SubgroupCtx ctx;
  for (const auto& s : gens) ctx.vrows.push_back(s.v);
  // commutator defects
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j)
      ctx.dspan.push_back(g.lambda_vec(gens[i].v, gens[j].v));
  // defects of combinations whose lattice part lies in R
  IntMatrix vmat = IntMatrix::from_rows(ctx.vrows, g.rank());
  IntMatrix ker = lattice_preimage(vmat, g.rel_basis());
  for (std::size_t k = 0; k < ker.rows; ++k) {
    Nil2Element w = g.identity();
    for (std::size_t j = 0; j < gens.size(); ++j)
      if (ker.at(k, j) != 0) w = g.mul(w, g.scaled(ker.at(k, j), gens[j]));
    ctx.dspan.push_back(w.c);
  }
  return ctx;
}

}  // namespace

bool Nil2Subgroup::contains(const Nil2Element& x) const {
  const Nil2Datum& g = owner;
  SubgroupCtx ctx = subgroup_ctx(g, gens);
  std::vector<Vec> rows = ctx.vrows;
  for (std::size_t k = 0; k < g.rel_basis().rows; ++k) rows.push_back(g.rel_basis().row(k));
  auto sol = solve_left(IntMatrix::from_rows(rows, g.rank()), x.v);
  if (!sol) return false;
  Nil2Element w = g.identity();
  for (std::size_t j = 0; j < gens.size(); ++j)
    if ((*sol)[j] != 0) w = g.mul(w, g.scaled((*sol)[j], gens[j]));
  FgabElement diff = x.c - w.c;
  return g.central().in_span(ctx.dspan, diff);
}

bool Nil2Subgroup::is_normal() const {
  for (const auto& s : gens)
    for (const auto& m : owner.marks()) {
      Nil2Element comm = owner.sub(owner.mul(m, s), owner.mul(s, m));
      if (!contains(comm)) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// QuadraticMap
// ---------------------------------------------------------------------------

QuadraticMap::QuadraticMap(Nil2Datum src, FgAbelianGroup dst, std::vector<FgabElement> values,
                           SparseForm phi)
    : src_(std::move(src)), dst_(std::move(dst)), values_(std::move(values)), phi_(std::move(phi)) {
  if (values_.size() != src_.nmarks()) throw SqgError("QuadraticMap: one value per mark");
  for (auto it = phi_.begin(); it != phi_.end();) {
    if (it->first.first >= src_.nmarks() || it->first.second >= src_.nmarks())
      throw SqgError("QuadraticMap: phi index out of range");
    if (it->second.is_zero())
      it = phi_.erase(it);
    else
      ++it;
  }
}

QuadraticMap QuadraticMap::zero(const Nil2Datum& src, const FgAbelianGroup& dst) {
  return QuadraticMap(src, dst, std::vector<FgabElement>(src.nmarks(), dst.zero()), {});
}

FgabElement QuadraticMap::phi_at(std::size_t i, std::size_t j) const {
  auto it = phi_.find({i, j});
  return it == phi_.end() ? dst_.zero() : it->second;
}

FgabElement QuadraticMap::phi_form(const Vec& x, const Vec& y) const {
  Vec acc(dst_.rank(), Int(0));
  for (const auto& [ij, val] : phi_) {
    const Int& a = x[ij.first];
    if (a == 0) continue;
    const Int& b = y[ij.second];
    if (b == 0) continue;
    Int c = a * b;
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += c * val.coords[k];
  }
  return dst_.element(std::move(acc));
}

FgabElement QuadraticMap::cross(const Nil2Element& x, const Nil2Element& y) const {
  return phi_form(src_.mark_coords(x), src_.mark_coords(y));
}

FgabElement QuadraticMap::eval_word(const Vec& coords) const {
  Vec acc(dst_.rank(), Int(0));
  auto addmul = [&](const FgabElement& v, const Int& c) {
    if (c == 0) return;
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += c * v.coords[k];
  };
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] != 0) addmul(values_[i], coords[i]);
  for (const auto& [ij, val] : phi_) {
    std::size_t i = ij.first, j = ij.second;
    if (i == j) {
      if (coords[i] != 0) addmul(val, binom2(coords[i]));
    } else if (i < j) {
      if (coords[i] != 0 && coords[j] != 0) addmul(val, coords[i] * coords[j]);
    }
  }
  return dst_.element(std::move(acc));
}

FgabElement QuadraticMap::eval(const Nil2Element& x) const {
  return eval_word(src_.mark_coords(x));
}

Report QuadraticMap::validate() const {
  Report rep;
  const Nil2Datum& S = src_;
  std::size_t nm = S.nmarks();
  // (a) phi factors through the abelianization
  bool ok = true;
  const FgAbelianGroup& ab = S.abelianization();
  const IntMatrix& abr = ab.rels();
  for (std::size_t r = 0; r < abr.rows && ok; ++r) {
    Vec row = abr.row(r);
    for (std::size_t j = 0; j < nm && ok; ++j) {
      Vec ej(nm, Int(0));
      ej[j] = 1;
      if (!phi_form(row, ej).is_zero() || !phi_form(ej, row).is_zero()) {
        rep.fail("phi-welldefined", "relation row " + std::to_string(r) + " vs mark " + std::to_string(j));
        ok = false;
      }
    }
  }
  if (ok) rep.pass("phi-welldefined");
  // (b) lattice relators: word(r) - word(rho_r)
  ok = true;
  for (std::size_t k = 0; k < S.rel_basis().rows && ok; ++k) {
    Vec rw(nm, Int(0));
    for (std::size_t j = 0; j < S.rank(); ++j) rw[j] = S.rel_basis().at(k, j);
    Vec pw(nm, Int(0));
    for (std::size_t m = 0; m < S.central().rank(); ++m)
      pw[S.rank() + m] = S.rho_basis(k).coords[m];
    // relator is word(r) + central(rho)
    FgabElement val = eval_word(rw) + eval_word(pw) + phi_form(rw, pw);
    if (!val.is_zero()) {
      rep.fail("relator-lattice", "relation row " + std::to_string(k));
      ok = false;
    }
  }
  if (ok) rep.pass("relator-lattice");
  // (c) commutator relators: f([g_i,g_j]) = phi(i,j) - phi(j,i) must match the
  // value on the central lambda word
  ok = true;
  for (std::size_t i = 0; i < S.rank() && ok; ++i)
    for (std::size_t j = i + 1; j < S.rank() && ok; ++j) {
      Vec ei(S.rank(), Int(0)), ej(S.rank(), Int(0));
      ei[i] = 1;
      ej[j] = 1;
      FgabElement lam = S.lambda_vec(ei, ej);
      Vec lw(nm, Int(0));
      for (std::size_t m = 0; m < S.central().rank(); ++m) lw[S.rank() + m] = lam.coords[m];
      FgabElement lhs = phi_at(i, j) - phi_at(j, i);
      if (!(lhs == eval_word(lw))) {
        rep.fail("relator-commutator", "pair " + std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
    }
  if (ok) rep.pass("relator-commutator");
  // (d) centrality relators
  ok = true;
  for (std::size_t m = 0; m < S.central().rank() && ok; ++m)
    for (std::size_t t = 0; t < nm && ok; ++t) {
      std::size_t zm = S.rank() + m;
      if (!(phi_at(zm, t) == phi_at(t, zm))) {
        rep.fail("relator-centrality", "central " + std::to_string(m) + " vs mark " + std::to_string(t));
        ok = false;
      }
    }
  if (ok) rep.pass("relator-centrality");
  // (e) central torsion relators
  ok = true;
  const Vec& cf = S.central().invariant_factors();
  for (std::size_t m = 0; m < S.central().rank() && ok; ++m) {
    if (cf[m] == 0) continue;
    std::size_t zm = S.rank() + m;
    FgabElement val = values_[zm].scaled(cf[m]) + phi_at(zm, zm).scaled(binom2(cf[m]));
    if (!val.is_zero()) {
      rep.fail("relator-torsion", "central generator " + std::to_string(m));
      ok = false;
    }
  }
  if (ok) rep.pass("relator-torsion");
  return rep;
}

Report validate_nil2(const Nil2Datum& d) { return d.validate(); }

bool quad_descends(const QuadraticMap& f, const std::vector<Nil2Element>& relators,
                   std::string* witness) {
  for (std::size_t i = 0; i < relators.size(); ++i)
    if (!f.eval(relators[i]).is_zero()) {
      if (witness) *witness = "relator " + std::to_string(i) + " = " + relators[i].str();
      return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// FreeNil2Group
// ---------------------------------------------------------------------------

FreeNil2Group::FreeNil2Group(std::vector<std::string> generator_names)
    : names_(std::move(generator_names)), datum_(Nil2Datum::free_nil2(names_.size())) {
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = i + 1; j < names_.size(); ++j)
      if (names_[i] == names_[j]) throw SqgError("FreeNil2Group: duplicate generator name");
}

std::size_t FreeNil2Group::gen_index(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  throw SqgError("unknown generator: " + name);
}

Nil2Element FreeNil2Group::reduce_word(const std::vector<Letter>& word) const {
  Nil2Element acc = datum_.identity();
  for (const auto& [idx, sign] : word) {
    if (idx >= names_.size()) throw SqgError("unknown generator index");
    Nil2Element g = datum_.mark(idx);
    acc = datum_.mul(acc, sign >= 0 ? g : datum_.inv(g));
  }
  return acc;
}

Nil2NormalForm FreeNil2Group::normal_form(const Nil2Element& x) const {
  Nil2NormalForm nf;
  nf.linear = x.v;
  std::size_t n = names_.size();
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++idx)
      if (x.c.coords[idx] != 0) nf.commutator[{i, j}] = x.c.coords[idx];
  return nf;
}

Nil2Element FreeNil2Group::parse_word(const std::string& text) const {
  std::vector<Letter> word;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    int sign = 1;
    if (tok[0] == '-') {
      sign = -1;
      tok = tok.substr(1);
    } else if (tok[0] == '+') {
      tok = tok.substr(1);
    }
    word.push_back({gen_index(tok), sign});
  }
  return reduce_word(word);
}

std::string Nil2NormalForm::str(const std::vector<std::string>& names) const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < linear.size(); ++i) {
    if (linear[i] == 0) continue;
    if (!first) os << " + ";
    if (linear[i] != 1) os << linear[i] << "*";
    os << names[i];
    first = false;
  }
  for (const auto& [ij, m] : commutator) {
    if (!first) os << " + ";
    if (m != 1) os << m << "*";
    os << "[" << names[ij.first] << "," << names[ij.second] << "]";
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

// ---------------------------------------------------------------------------
// Coproduct in Nil
// ---------------------------------------------------------------------------

Nil2Coproduct nil2_coproduct(const Nil2Datum& g, const Nil2Datum& h) {
  for (std::size_t m = 0; m < g.central().rank(); ++m)
    if (!g.ab_class(g.mark(g.rank() + m)).is_zero())
      throw SqgError("nil2_coproduct: left central generator has nontrivial abelianization class");
  for (std::size_t m = 0; m < h.central().rank(); ++m)
    if (!h.ab_class(h.mark(h.rank() + m)).is_zero())
      throw SqgError("nil2_coproduct: right central generator has nontrivial abelianization class");

  std::size_t n = g.rank() + h.rank();
  TensorAb pairing = fgab_tensor(g.abelianization(), h.abelianization());
  DirectSum cs = direct_sum({g.central(), h.central(), pairing.group});
  SparseForm beta;
  for (const auto& [ij, val] : g.beta()) beta[{ij.first, ij.second}] = cs.inject[0].apply(val);
  for (const auto& [ij, val] : h.beta())
    beta[{g.rank() + ij.first, g.rank() + ij.second}] = cs.inject[1].apply(val);
  // beta(h-gen a, g-gen b) = [h_a, g_b] = -(class g_b tensor class h_a)
  for (std::size_t a = 0; a < h.rank(); ++a)
    for (std::size_t b = 0; b < g.rank(); ++b) {
      FgabElement val = pairing.pair(g.ab_class(g.mark(b)), h.ab_class(h.mark(a)));
      if (val.is_zero()) continue;
      beta[{g.rank() + a, b}] = cs.inject[2].apply(-val);
    }
  std::vector<Vec> rel_rows;
  std::vector<FgabElement> rho;
  for (std::size_t k = 0; k < g.rel_basis().rows; ++k) {
    Vec row(n, Int(0));
    for (std::size_t j = 0; j < g.rank(); ++j) row[j] = g.rel_basis().at(k, j);
    rel_rows.push_back(row);
    rho.push_back(cs.inject[0].apply(g.rho_basis(k)));
  }
  for (std::size_t k = 0; k < h.rel_basis().rows; ++k) {
    Vec row(n, Int(0));
    for (std::size_t j = 0; j < h.rank(); ++j) row[g.rank() + j] = h.rel_basis().at(k, j);
    rel_rows.push_back(row);
    rho.push_back(cs.inject[1].apply(h.rho_basis(k)));
  }
  Nil2Coproduct out;
  out.group = Nil2Datum(n, IntMatrix::from_rows(rel_rows, n), cs.sum, rho, beta);
  out.pairing = pairing.group;
  out.pairing_into_central = cs.inject[2];

  std::vector<Nil2Element> li, ri;
  for (std::size_t i = 0; i < g.rank(); ++i) {
    Vec v(n, Int(0));
    v[i] = 1;
    li.push_back(out.group.lattice_elt(v));
  }
  for (std::size_t m = 0; m < g.central().rank(); ++m)
    li.push_back(out.group.central_elt(cs.inject[0].apply(g.central().canonical_gen(m))));
  for (std::size_t i = 0; i < h.rank(); ++i) {
    Vec v(n, Int(0));
    v[g.rank() + i] = 1;
    ri.push_back(out.group.lattice_elt(v));
  }
  for (std::size_t m = 0; m < h.central().rank(); ++m)
    ri.push_back(out.group.central_elt(cs.inject[1].apply(h.central().canonical_gen(m))));
  out.inj_left = Nil2Hom(g, out.group, li);
  out.inj_right = Nil2Hom(h, out.group, ri);
  return out;
}

// ---------------------------------------------------------------------------
// Quotient by normal closure
// ---------------------------------------------------------------------------

Nil2Quotient quotient_datum(const Nil2Datum& g, const std::vector<Nil2Element>& kill) {
  std::vector<Nil2Element> lattice_kills;
  std::vector<FgabElement> central_kills;
  for (const auto& q : kill) {
    if (is_zero_vec(q.v))
      central_kills.push_back(q.c);
    else
      lattice_kills.push_back(q);
  }
  // central elements forced to die: commutators with everything, and defects
  // of combinations whose lattice part already lies in R
  std::vector<FgabElement> z0 = central_kills;
  for (const auto& q : lattice_kills)
    for (std::size_t i = 0; i < g.rank(); ++i) {
      Vec ei(g.rank(), Int(0));
      ei[i] = 1;
      FgabElement lam = g.lambda_vec(q.v, ei);
      if (!lam.is_zero()) z0.push_back(lam);
    }
  std::vector<Vec> vrows;
  for (const auto& q : lattice_kills) vrows.push_back(q.v);
  IntMatrix vmat = IntMatrix::from_rows(vrows, g.rank());
  IntMatrix ker = lattice_preimage(vmat, g.rel_basis());
  for (std::size_t k = 0; k < ker.rows; ++k) {
    Nil2Element w = g.identity();
    for (std::size_t j = 0; j < lattice_kills.size(); ++j)
      if (ker.at(k, j) != 0) w = g.mul(w, g.scaled(ker.at(k, j), lattice_kills[j]));
    if (!w.c.is_zero()) z0.push_back(w.c);
  }
  auto [cq, cproj] = quotient_by_elements(g.central(), z0);

  IntMatrix rprime = lattice_sum(g.rel_basis(), vmat);
  std::vector<Vec> stack_rows = vrows;
  for (std::size_t k = 0; k < g.rel_basis().rows; ++k) stack_rows.push_back(g.rel_basis().row(k));
  IntMatrix stacked = IntMatrix::from_rows(stack_rows, g.rank());
  std::vector<FgabElement> rho_new;
  for (std::size_t k = 0; k < rprime.rows; ++k) {
    Vec row = rprime.row(k);
    auto sol = solve_left(stacked, row);
    if (!sol) throw SqgError("quotient_datum: relation solve failed");
    Nil2Element w = g.identity();
    for (std::size_t j = 0; j < lattice_kills.size(); ++j)
      if ((*sol)[j] != 0) w = g.mul(w, g.scaled((*sol)[j], lattice_kills[j]));
    Nil2Element delta = g.sub(g.lattice_elt(row), w);
    if (!is_zero_vec(delta.v)) throw SqgError("quotient_datum: defect not central");
    rho_new.push_back(-cproj.apply(delta.c));
  }
  SparseForm beta_new;
  for (const auto& [ij, val] : g.beta()) {
    FgabElement pv = cproj.apply(val);
    if (!pv.is_zero()) beta_new[ij] = pv;
  }
  Nil2Quotient out;
  out.group = Nil2Datum(g.rank(), rprime, cq, rho_new, beta_new);
  Report v = out.group.validate();
  if (!v.ok()) throw SqgError("quotient_datum: non-representable quotient: " + v.first_failure()->name);
  std::vector<Nil2Element> proj_imgs;
  for (std::size_t i = 0; i < g.rank(); ++i) {
    Vec ei(g.rank(), Int(0));
    ei[i] = 1;
    proj_imgs.push_back(out.group.lattice_elt(ei));
  }
  for (std::size_t m = 0; m < g.central().rank(); ++m)
    proj_imgs.push_back(out.group.central_elt(cproj.apply(g.central().canonical_gen(m))));
  out.proj = Nil2Hom(g, out.group, proj_imgs);
  return out;
}

// ---------------------------------------------------------------------------
// Hom kernels
// ---------------------------------------------------------------------------

std::vector<Nil2Element> hom_kernel_gens(const Nil2Hom& f) {
  const Nil2Datum& S = f.src();
  const Nil2Datum& D = f.dst();
  std::size_t nm = S.nmarks();
  // W = {w : lattice class of f(E(w)) vanishes}
  std::vector<Vec> mv_rows;
  for (std::size_t t = 0; t < nm; ++t) mv_rows.push_back(f.images()[t].v);
  IntMatrix mv = IntMatrix::from_rows(mv_rows, D.rank());
  IntMatrix w_basis = lattice_preimage(mv, D.rel_basis());
  std::size_t s = w_basis.rows;
  auto E = [&](const Vec& w) { return S.from_mark_coords(w); };
  std::vector<FgabElement> mu(s, D.central().zero());
  std::vector<Nil2Element> ew(s);
  for (std::size_t i = 0; i < s; ++i) {
    ew[i] = E(w_basis.row(i));
    Nil2Element img = f.apply(ew[i]);
    if (!is_zero_vec(img.v)) throw SqgError("hom_kernel_gens: W image not central");
    mu[i] = img.c;
  }
  // defect span D0: bilinear in the arguments, so basis pairs generate
  std::vector<FgabElement> d0;
  auto mu_of = [&](const Vec& w) {
    Nil2Element img = f.apply(E(w));
    if (!is_zero_vec(img.v)) throw SqgError("hom_kernel_gens: image not central");
    return img.c;
  };
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i; j < s; ++j) {
      FgabElement dd = mu[i] + mu[j] - mu_of(add_vec(w_basis.row(i), w_basis.row(j)));
      if (!dd.is_zero()) d0.push_back(dd);
    }
    FgabElement dn = mu[i] + mu_of(neg_vec(w_basis.row(i)));
    if (!dn.is_zero()) d0.push_back(dn);
  }
  auto [cd, cdproj] = quotient_by_elements(D.central(), d0);
  // kernel of a -> sum a_i mu[i] in C/D0
  FgAbelianGroup frees = FgAbelianGroup::free(s);
  std::vector<FgabElement> mu_proj;
  for (std::size_t i = 0; i < s; ++i) mu_proj.push_back(cdproj.apply(mu[i]));
  FgabHom psi = FgabHom::from_gen_images(frees, cd, mu_proj);
  auto [K2, incl2] = psi.kernel();
  std::vector<Nil2Element> gens;
  for (std::size_t k = 0; k < K2.rank(); ++k) {
    Vec a = incl2.apply(K2.canonical_gen(k)).coords;
    Vec w(nm, Int(0));
    for (std::size_t i = 0; i < s; ++i)
      if (a[i] != 0) w = add_vec(w, scale_vec(a[i], w_basis.row(i)));
    Nil2Element x = E(w);
    // adjust by a central element killing the residual image
    Nil2Element img = f.apply(x);
    if (!img.c.is_zero() || !is_zero_vec(img.v)) {
      // solve f(central(z)) = img over central generators of S with central image
      std::vector<FgabElement> span;
      std::vector<std::size_t> span_idx;
      std::vector<FgabElement> csp;
      for (std::size_t m = 0; m < S.central().rank(); ++m) {
        Nil2Element zi = f.apply(S.mark(S.rank() + m));
        if (is_zero_vec(zi.v)) {
          span.push_back(zi.c);
          span_idx.push_back(m);
        }
      }
      auto sol = D.central().solve(span, img.c);
      if (!sol) throw SqgError("hom_kernel_gens: cannot neutralize residual central image");
      FgabElement z = S.central().zero();
      for (std::size_t t = 0; t < span.size(); ++t)
        z = z + S.central().canonical_gen(span_idx[t]).scaled((*sol)[t]);
      x = S.sub(x, S.central_elt(z));
    }
    if (!f.apply(x).is_identity()) throw SqgError("hom_kernel_gens: adjustment failed");
    if (!x.is_identity()) gens.push_back(x);
  }
  // kernel of f restricted to central elements (an honest homomorphism)
  {
    std::vector<Vec> cm_rows;
    for (std::size_t m = 0; m < S.central().rank(); ++m)
      cm_rows.push_back(f.images()[S.rank() + m].v);
    FgabHom vbar = FgabHom::from_gen_images(
        S.central(), FgAbelianGroup::from_presentation(D.rank(), D.rel_basis()),
        [&] {
          std::vector<FgabElement> imgs;
          FgAbelianGroup q = FgAbelianGroup::from_presentation(D.rank(), D.rel_basis());
          for (std::size_t m = 0; m < S.central().rank(); ++m)
            imgs.push_back(q.from_presentation_coords(cm_rows[m]));
          return imgs;
        }());
    auto [K1c, incl1c] = vbar.kernel();
    std::vector<FgabElement> cimgs;
    for (std::size_t k = 0; k < K1c.rank(); ++k) {
      FgabElement z = incl1c.apply(K1c.canonical_gen(k));
      Nil2Element img = f.apply(S.central_elt(z));
      if (!is_zero_vec(img.v)) throw SqgError("hom_kernel_gens: central image not central");
      cimgs.push_back(img.c);
    }
    FgabHom cmap = FgabHom::from_gen_images(K1c, D.central(), cimgs);
    auto [K2c, incl2c] = cmap.kernel();
    for (std::size_t k = 0; k < K2c.rank(); ++k) {
      FgabElement z = incl1c.apply(incl2c.apply(K2c.canonical_gen(k)));
      Nil2Element x = S.central_elt(z);
      if (!f.apply(x).is_identity()) throw SqgError("hom_kernel_gens: central kernel mismatch");
      if (!x.is_identity()) gens.push_back(x);
    }
  }
  return gens;
}

bool hom_is_surjective(const Nil2Hom& f) {
  std::vector<Nil2Element> imgs = f.images();
  return quotient_datum(f.dst(), imgs).group.is_trivial_group();
}

bool hom_is_injective(const Nil2Hom& f) {
  for (const auto& g : hom_kernel_gens(f))
    if (!g.is_identity()) return false;
  return true;
}

}  // namespace sqg
