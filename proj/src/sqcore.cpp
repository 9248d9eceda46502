#include "sqg/sqcore.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

namespace sqg {

struct SqData {
  Nil2Datum e;
  FgAbelianGroup ee;
  std::vector<Nil2Element> pvals;  // per ee canonical generator
  QuadraticMap h;
  std::string shape;
  // derived caches
  FgabHom t;
  FgAbelianGroup cokp;
  FgabHom cokp_proj;   // abelianization(e) -> cokp
  IntMatrix cok_lift;  // cokp.rank x nmarks
  FgabHom delta;       // cokp -> ee
  // the tensor square of Coker(P) is only needed by coherence checks; built
  // on first use since intermediate objects can be large
  mutable std::once_flag cok_sq_once;
  mutable TensorAb cok_sq;
  mutable FgabHom cross_hom;
  void ensure_cok_sq() const {
    std::call_once(cok_sq_once, [this] {
      cok_sq = fgab_tensor(cokp, cokp);
      std::vector<FgabElement> imgs;
      for (std::size_t i = 0; i < cokp.rank(); ++i)
        for (std::size_t j = 0; j < cokp.rank(); ++j)
          imgs.push_back(h.phi_form(cok_lift.row(i), cok_lift.row(j)));
      cross_hom = FgabHom::from_pres_images(cok_sq.group, ee, imgs);
    });
  }
};

SquareGroup SquareGroup::make(Nil2Datum e, FgAbelianGroup ee, std::vector<Nil2Element> pvals,
                              QuadraticMap h, std::string shape) {
  auto d = std::make_shared<SqData>();
  d->e = std::move(e);
  d->ee = std::move(ee);
  d->pvals = std::move(pvals);
  d->h = std::move(h);
  d->shape = std::move(shape);
  if (d->pvals.size() != d->ee.rank()) throw SqgError("SquareGroup: one P value per ee generator");
  if (!d->h.dst().same_shape(d->ee)) throw SqgError("SquareGroup: H target mismatch");

  // T = HP - Id
  std::vector<FgabElement> timgs;
  for (std::size_t i = 0; i < d->ee.rank(); ++i)
    timgs.push_back(d->h.eval(d->pvals[i]) - d->ee.canonical_gen(i));
  d->t = FgabHom::from_gen_images(d->ee, d->ee, timgs);

  // Coker(P) as a quotient of the abelianization
  const FgAbelianGroup& ab = d->e.abelianization();
  std::vector<FgabElement> kill;
  for (const auto& pv : d->pvals) kill.push_back(d->e.ab_class(pv));
  auto [cok, proj] = quotient_by_elements(ab, kill);
  d->cokp = cok;
  d->cokp_proj = proj;
  // lifts: cokp pres gens = ab canonical gens; ab pres gens = marks
  d->cok_lift = d->cokp.from_can().mul(ab.from_can());

  // Delta on marks: (x|x)_H - H(x) + TH(x), then descend to cokp
  std::vector<FgabElement> dvals;
  for (std::size_t i = 0; i < d->e.nmarks(); ++i) {
    Nil2Element m = d->e.mark(i);
    FgabElement hx = d->h.eval(m);
    dvals.push_back(d->h.cross(m, m) - hx + d->t.apply(hx));
  }
  FgabHom delta_ab = FgabHom::from_pres_images(ab, d->ee, dvals);
  std::vector<FgabElement> dq;
  for (std::size_t i = 0; i < d->cokp.ngens(); ++i) dq.push_back(delta_ab.apply(ab.canonical_gen(i)));
  d->delta = FgabHom::from_pres_images(d->cokp, d->ee, dq);

  return SquareGroup(std::move(d));
}

const Nil2Datum& SquareGroup::e() const { return d_->e; }
const FgAbelianGroup& SquareGroup::ee() const { return d_->ee; }
const QuadraticMap& SquareGroup::h() const { return d_->h; }
const std::vector<Nil2Element>& SquareGroup::pvals() const { return d_->pvals; }
const std::string& SquareGroup::shape() const { return d_->shape; }

Nil2Element SquareGroup::apply_p(const FgabElement& a) const {
  Nil2Element acc = d_->e.identity();
  for (std::size_t i = 0; i < d_->ee.rank(); ++i)
    if (a.coords[i] != 0) acc = d_->e.mul(acc, d_->e.scaled(a.coords[i], d_->pvals[i]));
  return acc;
}

FgabElement SquareGroup::apply_h(const Nil2Element& x) const { return d_->h.eval(x); }
FgabElement SquareGroup::cross(const Nil2Element& x, const Nil2Element& y) const {
  return d_->h.cross(x, y);
}

const FgabHom& SquareGroup::t() const { return d_->t; }
const FgAbelianGroup& SquareGroup::cokp() const { return d_->cokp; }

FgabElement SquareGroup::cokp_class(const Nil2Element& x) const {
  return d_->cokp_proj.apply(d_->e.ab_class(x));
}

FgabElement SquareGroup::cokp_proj_ab(std::size_t ab_gen) const {
  return d_->cokp_proj.apply(d_->e.abelianization().canonical_gen(ab_gen));
}

Nil2Element SquareGroup::cokp_lift(const FgabElement& xbar) const {
  Vec acc(d_->e.nmarks(), Int(0));
  for (std::size_t k = 0; k < d_->cokp.rank(); ++k)
    if (xbar.coords[k] != 0) acc = add_vec(acc, scale_vec(xbar.coords[k], d_->cok_lift.row(k)));
  return d_->e.from_mark_coords(acc);
}

const FgabHom& SquareGroup::delta() const { return d_->delta; }
const TensorAb& SquareGroup::cok_sq() const {
  d_->ensure_cok_sq();
  return d_->cok_sq;
}
const FgabHom& SquareGroup::cross_hom() const {
  d_->ensure_cok_sq();
  return d_->cross_hom;
}

bool SquareGroup::is_zero_object() const { return d_->e.is_trivial_group() && d_->ee.is_trivial(); }
bool SquareGroup::is_abelian_sg() const { return d_->h.phi().empty(); }
bool SquareGroup::is_quadratic_zmodule() const { return is_abelian_sg() && d_->delta.is_zero(); }
bool SquareGroup::levels_finite() const { return d_->e.is_finite() && d_->ee.is_finite(); }
bool SquareGroup::same_instance(const SquareGroup& o) const { return d_ == o.d_; }

std::string SquareGroup::str() const {
  std::ostringstream os;
  os << "sq(e=" << d_->e.str() << ", ee=" << d_->ee.str();
  if (!d_->shape.empty()) os << ", " << d_->shape;
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Morphisms
// ---------------------------------------------------------------------------

SgMorphism::SgMorphism(SquareGroup src, SquareGroup dst, Nil2Hom fe, FgabHom fee)
    : src_(std::move(src)), dst_(std::move(dst)), fe_(std::move(fe)), fee_(std::move(fee)) {}

SgMorphism SgMorphism::identity(const SquareGroup& m) {
  return SgMorphism(m, m, Nil2Hom::identity(m.e()), FgabHom::identity(m.ee()));
}

SgMorphism SgMorphism::zero(const SquareGroup& src, const SquareGroup& dst) {
  return SgMorphism(src, dst, Nil2Hom::constant_trivial(src.e(), dst.e()),
                    FgabHom::zero(src.ee(), dst.ee()));
}

SgMorphism SgMorphism::then(const SgMorphism& g) const {
  return SgMorphism(src_, g.dst(), fe_.then(g.fe()), fee_.then(g.fee()));
}

Report SgMorphism::validate() const {
  Report rep = fe_.validate();
  bool ok = true;
  for (std::size_t i = 0; i < src_.ee().rank() && ok; ++i) {
    FgabElement g = src_.ee().canonical_gen(i);
    if (!(fe_.apply(src_.apply_p(g)) == dst_.apply_p(fee_.apply(g)))) {
      rep.fail("morphism-P", "ee generator " + std::to_string(i));
      ok = false;
    }
  }
  if (ok) rep.pass("morphism-P");
  ok = true;
  std::size_t nm = src_.e().nmarks();
  for (std::size_t i = 0; i < nm && ok; ++i) {
    if (!(fee_.apply(src_.apply_h(src_.e().mark(i))) == dst_.apply_h(fe_.apply(src_.e().mark(i))))) {
      rep.fail("morphism-H", "mark " + std::to_string(i));
      ok = false;
    }
  }
  for (std::size_t i = 0; i < nm && ok; ++i)
    for (std::size_t j = 0; j < nm && ok; ++j) {
      FgabElement lhs = fee_.apply(src_.h().phi_at(i, j));
      FgabElement rhs = dst_.cross(fe_.apply(src_.e().mark(i)), fe_.apply(src_.e().mark(j)));
      if (!(lhs == rhs)) {
        rep.fail("morphism-cross", std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
    }
  if (ok) rep.pass("morphism-H");
  return rep;
}

bool SgMorphism::equals(const SgMorphism& o) const {
  return fe_.equals(o.fe_) && fee_.equals(o.fee_);
}

bool SgMorphism::is_iso() const {
  if (!fee_.is_iso()) return false;
  return hom_is_injective(fe_) && hom_is_surjective(fe_);
}

// ---------------------------------------------------------------------------
// Axioms
// ---------------------------------------------------------------------------

Report validate_square_group(const SquareGroup& m) {
  Report rep;
  rep.merge(m.e().validate(), "e-");
  rep.merge(m.h().validate(), "H-");
  const FgAbelianGroup& ee = m.ee();
  bool ok = true;
  const Vec& f = ee.invariant_factors();
  for (std::size_t i = 0; i < ee.rank() && ok; ++i) {
    if (!m.e().is_central(m.pvals()[i])) {
      rep.fail("P-central", "ee generator " + std::to_string(i));
      ok = false;
    }
    if (ok && f[i] != 0 && !m.e().scaled(f[i], m.pvals()[i]).is_identity()) {
      rep.fail("P-torsion", "ee generator " + std::to_string(i));
      ok = false;
    }
  }
  if (ok) rep.pass("P-hom");
  // (Pa|y)_H = 0 = (x|Pb)_H
  ok = true;
  std::size_t nm = m.e().nmarks();
  for (std::size_t a = 0; a < ee.rank() && ok; ++a) {
    Vec pc = m.e().mark_coords(m.pvals()[a]);
    for (std::size_t j = 0; j < nm && ok; ++j) {
      Vec ej(nm, Int(0));
      ej[j] = 1;
      if (!m.h().phi_form(pc, ej).is_zero() || !m.h().phi_form(ej, pc).is_zero()) {
        rep.fail("cross-P-vanishes",
                 "P generator " + std::to_string(a) + " vs mark " + std::to_string(j));
        ok = false;
      }
    }
  }
  if (ok) rep.pass("cross-P-vanishes");
  // P(x|y)_H = -x-y+x+y on mark pairs
  ok = true;
  for (std::size_t i = 0; i < nm && ok; ++i)
    for (std::size_t j = 0; j < nm && ok; ++j) {
      FgabElement c = m.h().phi_at(i, j);
      Nil2Element comm = m.e().commutator(m.e().mark(i), m.e().mark(j));
      if (c.is_zero() && comm.is_identity()) continue;
      if (!(m.apply_p(c) == comm)) {
        rep.fail("P-cross-commutator", std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
    }
  if (ok) rep.pass("P-cross-commutator");
  // PHP = 2P
  ok = true;
  for (std::size_t a = 0; a < ee.rank() && ok; ++a) {
    if (!(m.apply_p(m.apply_h(m.pvals()[a])) == m.e().scaled(2, m.pvals()[a]))) {
      rep.fail("PHP=2P", "ee generator " + std::to_string(a));
      ok = false;
    }
  }
  if (ok) rep.pass("PHP=2P");
  return rep;
}

DerivedData derive(const SquareGroup& m) {
  DerivedData out;
  out.t = m.t();
  out.cokp = m.cokp();
  out.delta = m.delta();
  out.cross_hom = m.cross_hom();
  Report& rep = out.invariants;
  const FgAbelianGroup& ee = m.ee();
  rep.check(out.t.then(out.t).equals(FgabHom::identity(ee)), "T^2=Id");
  bool ok = true;
  for (std::size_t a = 0; a < ee.rank() && ok; ++a)
    if (!(m.apply_p(out.t.apply(ee.canonical_gen(a))) == m.apply_p(ee.canonical_gen(a)))) {
      rep.fail("PT=P", "ee generator " + std::to_string(a));
      ok = false;
    }
  if (ok) rep.pass("PT=P");
  ok = true;
  std::size_t nm = m.e().nmarks();
  for (std::size_t i = 0; i < nm && ok; ++i)
    for (std::size_t j = 0; j < nm && ok; ++j)
      if (!(out.t.apply(m.h().phi_at(i, j)) + m.h().phi_at(j, i)).is_zero()) {
        rep.fail("T-cross", std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
  if (ok) rep.pass("T-cross");
  ok = true;
  for (std::size_t k = 0; k < out.cokp.rank() && ok; ++k)
    if (!m.apply_p(out.delta.apply(out.cokp.canonical_gen(k))).is_identity()) {
      rep.fail("PDelta=0", "cokp generator " + std::to_string(k));
      ok = false;
    }
  if (ok) rep.pass("PDelta=0");
  rep.check(out.delta.plus(out.delta.then(out.t)).is_zero(), "Delta+TDelta=0");

  // k : Coker(P) -> Ker(P : ee/(Id-T) -> M_e)
  FgabHom id_minus_t = FgabHom::identity(ee).minus(out.t);
  std::vector<FgabElement> imt;
  for (std::size_t a = 0; a < ee.rank(); ++a) imt.push_back(id_minus_t.apply(ee.canonical_gen(a)));
  auto [q1, q1proj] = quotient_by_elements(ee, imt);
  FgAbelianGroup lat = FgAbelianGroup::from_presentation(m.e().rank(), m.e().rel_basis());
  std::vector<FgabElement> vimgs;
  for (std::size_t i = 0; i < q1.ngens(); ++i)
    vimgs.push_back(lat.from_presentation_coords(m.pvals()[i].v));
  FgabHom vbar = FgabHom::from_pres_images(q1, lat, vimgs);
  auto [k1, incl1] = vbar.kernel();
  // q1 -> ee lift matrix: q1 pres gens are ee canonical gens
  IntMatrix q1lift = q1.from_can();  // q1.rank x ee.rank
  auto lift_q1 = [&, q1 = q1](const FgabElement& x) {
    return ee.element(mul_row(x.coords, q1lift));
  };
  std::vector<FgabElement> cimgs;
  for (std::size_t i = 0; i < k1.rank(); ++i) {
    FgabElement a = lift_q1(incl1.apply(k1.canonical_gen(i)));
    Nil2Element px = m.apply_p(a);
    if (!is_zero_vec(px.v)) throw SqgError("derive: P image not central on kernel");
    cimgs.push_back(px.c);
  }
  FgabHom cmap = FgabHom::from_gen_images(k1, m.e().central(), cimgs);
  auto [k2, incl2] = cmap.kernel();
  out.kgroup = k2;
  FgAbelianGroup q1g = q1, k1g = k1;
  FgabHom q1p = q1proj, i1 = incl1, i2 = incl2;
  FgAbelianGroup k2g = k2;
  out.classify = [q1g, q1p, k1g, i1, k2g, i2](const FgabElement& x) {
    FgabElement xq = q1p.apply(x);
    std::vector<FgabElement> span1;
    for (std::size_t i = 0; i < k1g.rank(); ++i) span1.push_back(i1.apply(k1g.canonical_gen(i)));
    auto s1 = q1g.solve(span1, xq);
    if (!s1) throw SqgError("classify: element not in Ker(P), stage 1");
    FgabElement xk1 = k1g.element(*s1);
    std::vector<FgabElement> span2;
    for (std::size_t i = 0; i < k2g.rank(); ++i) span2.push_back(i2.apply(k2g.canonical_gen(i)));
    auto s2 = k1g.solve(span2, xk1);
    if (!s2) throw SqgError("classify: element not in Ker(P), stage 2");
    return k2g.element(*s2);
  };
  std::vector<FgabElement> kimgs;
  for (std::size_t k = 0; k < out.cokp.rank(); ++k)
    kimgs.push_back(out.classify(out.delta.apply(out.cokp.canonical_gen(k))));
  out.k = FgabHom::from_gen_images(out.cokp, out.kgroup, kimgs);
  ok = true;
  for (std::size_t i = 0; i < nm && ok; ++i) {
    Nil2Element x = m.e().mark(i);
    if (!(out.k.apply(m.cokp_class(x)) == out.classify(m.cross(x, x)))) {
      rep.fail("k=(x|x)_H", "mark " + std::to_string(i));
      ok = false;
    }
  }
  if (ok) rep.pass("k=(x|x)_H");
  return out;
}

Nil2Hom n_star(const SquareGroup& m, const Int& n) {
  std::vector<Nil2Element> imgs;
  const Nil2Datum& e = m.e();
  for (std::size_t i = 0; i < e.nmarks(); ++i) {
    Nil2Element x = e.mark(i);
    imgs.push_back(e.mul(e.scaled(n, x), e.scaled(binom2(n), m.apply_p(m.apply_h(x)))));
  }
  return Nil2Hom(e, e, imgs);
}

Report n_star_checks(const SquareGroup& m, const Int& n, const Int& mm) {
  Report rep;
  Nil2Hom nh = n_star(m, n), mh = n_star(m, mm), nm_h = n_star(m, n * mm);
  rep.merge(nh.validate(), "n*-hom-");
  rep.check(mh.then(nh).equals(nm_h), "(nm)*=n*m*");
  bool ok = true;
  for (std::size_t a = 0; a < m.ee().rank() && ok; ++a) {
    FgabElement g = m.ee().canonical_gen(a);
    if (!(m.apply_p(g.scaled(n * n)) == nh.apply(m.apply_p(g)))) {
      rep.fail("P(n^2 a)=n*(Pa)", "ee generator " + std::to_string(a));
      ok = false;
    }
  }
  if (ok) rep.pass("P(n^2 a)=n*(Pa)");
  ok = true;
  for (std::size_t i = 0; i < m.e().nmarks() && ok; ++i)
    for (std::size_t j = 0; j < m.e().nmarks() && ok; ++j) {
      FgabElement lhs = m.cross(nh.apply(m.e().mark(i)), nh.apply(m.e().mark(j)));
      if (!(lhs == m.h().phi_at(i, j).scaled(n * n))) {
        rep.fail("(n*x|n*y)=n^2(x|y)", std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
    }
  if (ok) rep.pass("(n*x|n*y)=n^2(x|y)");
  return rep;
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

SquareGroup znil() {
  Nil2Datum e = Nil2Datum::from_abelian(FgAbelianGroup::free(1));
  FgAbelianGroup ee = FgAbelianGroup::free(1);
  SparseForm phi;
  phi[{0, 0}] = ee.canonical_gen(0);
  QuadraticMap h(e, ee, {ee.zero()}, phi);
  return SquareGroup::make(e, ee, {e.identity()}, h, "znil");
}

SquareGroup znil_set(const std::vector<std::string>& s) {
  std::size_t n = s.size();
  FreeNil2Group f(s);
  Nil2Datum e = f.datum();
  FgAbelianGroup ee = FgAbelianGroup::free(n * n);  // basis s_i (x) s_j at i*n+j
  std::vector<Nil2Element> pvals;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      pvals.push_back(e.commutator(e.mark(j), e.mark(i)));  // P(s_i x s_j) = [s_j, s_i]
  SparseForm phi;  // (s_i | s_j)_H = s_j (x) s_i
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) phi[{i, j}] = ee.canonical_gen(j * n + i);
  std::vector<FgabElement> hv(e.nmarks(), ee.zero());
  std::size_t idx = n;  // central marks: [s_i, s_j], i<j
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++idx)
      hv[idx] = ee.canonical_gen(j * n + i) - ee.canonical_gen(i * n + j);
  QuadraticMap h(e, ee, hv, phi);
  return SquareGroup::make(e, ee, pvals, h, n == 1 ? "znil" : "znil_set");
}

SquareGroup a_tensor(const FgAbelianGroup& a) {
  Nil2Datum e = Nil2Datum::from_abelian(a);
  DirectSum ds = direct_sum({a, a});
  std::vector<Nil2Element> pvals;
  for (std::size_t i = 0; i < ds.sum.rank(); ++i) {
    FgabElement x = ds.project[0].apply(ds.sum.canonical_gen(i)) +
                    ds.project[1].apply(ds.sum.canonical_gen(i));
    pvals.push_back(e.lattice_elt(x.coords));
  }
  std::vector<FgabElement> hv;
  for (std::size_t i = 0; i < a.rank(); ++i) {
    FgabElement g = a.canonical_gen(i);
    hv.push_back(ds.inject[0].apply(g) + ds.inject[1].apply(g));
  }
  QuadraticMap h(e, ds.sum, hv, {});
  return SquareGroup::make(e, ds.sum, pvals, h, "a_tensor");
}

SquareGroup zq() {
  Nil2Datum e = Nil2Datum::from_abelian(FgAbelianGroup::free(2));
  FgAbelianGroup ee = FgAbelianGroup::free(3);
  Vec w(2, Int(0));
  w[1] = 1;
  std::vector<Nil2Element> pvals{e.lattice_elt(w), e.scaled(2, e.lattice_elt(w)), e.identity()};
  SparseForm phi;
  phi[{0, 0}] = ee.canonical_gen(2);
  QuadraticMap h(e, ee, {ee.canonical_gen(0), ee.canonical_gen(1)}, phi);
  return SquareGroup::make(e, ee, pvals, h, "zq");
}

SquareGroup v_free(std::size_t n) {
  // lattice gens: s_0..s_{n-1}, p_0..p_{n-1}; C = Lambda^2 on the s block
  std::size_t rank = 2 * n;
  FgAbelianGroup c = FgAbelianGroup::free(n * (n - 1) / 2);
  auto pair_index = [n](std::size_t i, std::size_t j) {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  };
  SparseForm beta;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      Vec cc(c.rank(), Int(0));
      cc[pair_index(j, i)] = -1;
      beta[{i, j}] = c.element(cc);
    }
  Nil2Datum e(rank, IntMatrix(0, rank), c, {}, beta);
  std::size_t eerank = n + n * n + n;  // [Hs | (i,j) | HPHs]
  FgAbelianGroup ee = FgAbelianGroup::free(eerank);
  auto hs = [&](std::size_t k) { return ee.canonical_gen(k); };
  auto sij = [&](std::size_t i, std::size_t j) { return ee.canonical_gen(n + i * n + j); };
  auto hphs = [&](std::size_t k) { return ee.canonical_gen(n + n * n + k); };
  std::vector<Nil2Element> pvals;
  for (std::size_t k = 0; k < n; ++k) {
    Vec v(rank, Int(0));
    v[n + k] = 1;
    pvals.push_back(e.lattice_elt(v));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pvals.push_back(e.commutator(e.mark(i), e.mark(j)));
  for (std::size_t k = 0; k < n; ++k) {
    Vec v(rank, Int(0));
    v[n + k] = 2;
    pvals.push_back(e.lattice_elt(v));
  }
  std::vector<FgabElement> hv(e.nmarks(), ee.zero());
  for (std::size_t k = 0; k < n; ++k) {
    hv[k] = hs(k);
    hv[n + k] = hphs(k);
  }
  std::size_t idx = rank;  // central marks: [s_i, s_j], i<j
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++idx) hv[idx] = sij(i, j) - sij(j, i);
  SparseForm phi;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) phi[{i, j}] = sij(i, j);
  QuadraticMap h(e, ee, hv, phi);
  return SquareGroup::make(e, ee, pvals, h, "v_free");
}

SquareGroup e_involution(const FgAbelianGroup& l, const FgabHom& tau) {
  if (!tau.then(tau).equals(FgabHom::identity(l)))
    throw SqgError("e_involution: tau is not an involution");
  FgabHom id_plus = FgabHom::identity(l).plus(tau);
  std::vector<FgabElement> kill;
  for (std::size_t i = 0; i < l.rank(); ++i) kill.push_back(id_plus.apply(l.canonical_gen(i)));
  auto [q, proj] = quotient_by_elements(l, kill);
  Nil2Datum e = Nil2Datum::from_abelian(q);
  std::vector<Nil2Element> pvals;
  for (std::size_t i = 0; i < l.rank(); ++i)
    pvals.push_back(e.lattice_elt(proj.apply(l.canonical_gen(i)).coords));
  FgabHom id_minus = FgabHom::identity(l).minus(tau);
  std::vector<FgabElement> hv;
  for (std::size_t k = 0; k < q.rank(); ++k) {
    // lift canonical generator of the quotient back to l (pres gens of q are
    // the canonical generators of l)
    hv.push_back(id_minus.apply(l.element(q.from_can().row(k))));
  }
  QuadraticMap h(e, l, hv, {});
  return SquareGroup::make(e, l, pvals, h, "e_involution");
}

SquareGroup from_abelian(const FgAbelianGroup& a) {
  Nil2Datum e = Nil2Datum::from_abelian(a);
  FgAbelianGroup ee;
  QuadraticMap h(e, ee, std::vector<FgabElement>(e.nmarks(), ee.zero()), {});
  return SquareGroup::make(e, ee, {}, h, "from_abelian");
}

namespace {

Nil2Datum product_datum(const Nil2Datum& g, const Nil2Datum& h, DirectSum& cs_out) {
  std::size_t n = g.rank() + h.rank();
  DirectSum cs = direct_sum({g.central(), h.central()});
  SparseForm beta;
  for (const auto& [ij, val] : g.beta()) beta[ij] = cs.inject[0].apply(val);
  for (const auto& [ij, val] : h.beta())
    beta[{g.rank() + ij.first, g.rank() + ij.second}] = cs.inject[1].apply(val);
  std::vector<Vec> rows;
  std::vector<FgabElement> rho;
  for (std::size_t k = 0; k < g.rel_basis().rows; ++k) {
    Vec row(n, Int(0));
    for (std::size_t j = 0; j < g.rank(); ++j) row[j] = g.rel_basis().at(k, j);
    rows.push_back(row);
    rho.push_back(cs.inject[0].apply(g.rho_basis(k)));
  }
  for (std::size_t k = 0; k < h.rel_basis().rows; ++k) {
    Vec row(n, Int(0));
    for (std::size_t j = 0; j < h.rank(); ++j) row[g.rank() + j] = h.rel_basis().at(k, j);
    rows.push_back(row);
    rho.push_back(cs.inject[1].apply(h.rho_basis(k)));
  }
  cs_out = cs;
  return Nil2Datum(n, IntMatrix::from_rows(rows, n), cs.sum, rho, beta);
}

Nil2Element embed_product(const Nil2Datum& prod, const DirectSum& cs, const Nil2Element& x,
                          bool left, std::size_t left_rank) {
  Vec v(prod.rank(), Int(0));
  for (std::size_t i = 0; i < x.v.size(); ++i) v[(left ? 0 : left_rank) + i] = x.v[i];
  return prod.element(v, cs.inject[left ? 0 : 1].apply(x.c));
}

}  // namespace

SquareGroup sg_product(const SquareGroup& m, const SquareGroup& n) {
  DirectSum cs;
  Nil2Datum e = product_datum(m.e(), n.e(), cs);
  DirectSum ee = direct_sum({m.ee(), n.ee()});
  std::vector<Nil2Element> pvals;
  for (std::size_t i = 0; i < ee.sum.rank(); ++i) {
    FgabElement a = ee.project[0].apply(ee.sum.canonical_gen(i));
    FgabElement b = ee.project[1].apply(ee.sum.canonical_gen(i));
    pvals.push_back(e.mul(embed_product(e, cs, m.apply_p(a), true, m.e().rank()),
                          embed_product(e, cs, n.apply_p(b), false, m.e().rank())));
  }
  // mark-coordinate decomposition of product marks into left/right components
  auto comp_coords = [&](std::size_t t, bool left_side) {
    const Nil2Datum& src = left_side ? m.e() : n.e();
    Vec out(src.nmarks(), Int(0));
    if (t < m.e().rank()) {
      if (left_side) out[t] = 1;
    } else if (t < m.e().rank() + n.e().rank()) {
      if (!left_side) out[t - m.e().rank()] = 1;
    } else {
      std::size_t idx = t - m.e().rank() - n.e().rank();
      FgabElement part =
          (left_side ? cs.project[0] : cs.project[1]).apply(cs.sum.canonical_gen(idx));
      for (std::size_t k = 0; k < part.coords.size(); ++k) out[src.rank() + k] = part.coords[k];
    }
    return out;
  };
  std::vector<FgabElement> hv(e.nmarks(), ee.sum.zero());
  for (std::size_t t = 0; t < e.nmarks(); ++t)
    hv[t] = ee.inject[0].apply(m.h().eval_word(comp_coords(t, true))) +
            ee.inject[1].apply(n.h().eval_word(comp_coords(t, false)));
  SparseForm phi;
  auto add_factor_phi = [&](const SquareGroup& fac, bool left_side, const FgabHom& inj) {
    if (fac.h().phi().empty()) return;
    std::vector<std::vector<std::pair<std::size_t, Int>>> carriers(fac.e().nmarks());
    for (std::size_t s = 0; s < e.nmarks(); ++s) {
      Vec cc = comp_coords(s, left_side);
      for (std::size_t i = 0; i < cc.size(); ++i)
        if (cc[i] != 0) carriers[i].push_back({s, cc[i]});
    }
    for (const auto& [ij, val] : fac.h().phi()) {
      FgabElement v = inj.apply(val);
      for (const auto& [s, a] : carriers[ij.first])
        for (const auto& [t, b] : carriers[ij.second]) {
          FgabElement add = v.scaled(a * b);
          auto key = std::make_pair(s, t);
          auto it = phi.find(key);
          if (it == phi.end())
            phi[key] = add;
          else
            it->second = it->second + add;
        }
    }
  };
  add_factor_phi(m, true, ee.inject[0]);
  add_factor_phi(n, false, ee.inject[1]);
  for (auto it = phi.begin(); it != phi.end();)
    it = it->second.is_zero() ? phi.erase(it) : std::next(it);
  QuadraticMap h(e, ee.sum, hv, phi);
  return SquareGroup::make(e, ee.sum, pvals, h, "product");
}

std::vector<SgMorphism> sg_product_projections(const SquareGroup& prod, const SquareGroup& m,
                                               const SquareGroup& n) {
  DirectSum cs = direct_sum({m.e().central(), n.e().central()});
  DirectSum ee = direct_sum({m.ee(), n.ee()});
  std::vector<Nil2Element> pl, pr;
  for (std::size_t i = 0; i < m.e().rank(); ++i) {
    pl.push_back(m.e().mark(i));
    pr.push_back(n.e().identity());
  }
  for (std::size_t i = 0; i < n.e().rank(); ++i) {
    pl.push_back(m.e().identity());
    pr.push_back(n.e().mark(i));
  }
  for (std::size_t i = 0; i < cs.sum.rank(); ++i) {
    pl.push_back(m.e().central_elt(cs.project[0].apply(cs.sum.canonical_gen(i))));
    pr.push_back(n.e().central_elt(cs.project[1].apply(cs.sum.canonical_gen(i))));
  }
  return {SgMorphism(prod, m, Nil2Hom(prod.e(), m.e(), pl), ee.project[0]),
          SgMorphism(prod, n, Nil2Hom(prod.e(), n.e(), pr), ee.project[1])};
}

std::vector<SgMorphism> sg_product_injections(const SquareGroup& prod, const SquareGroup& m,
                                              const SquareGroup& n) {
  DirectSum cs = direct_sum({m.e().central(), n.e().central()});
  DirectSum ee = direct_sum({m.ee(), n.ee()});
  std::vector<Nil2Element> il, ir;
  for (std::size_t t = 0; t < m.e().nmarks(); ++t)
    il.push_back(embed_product(prod.e(), cs, m.e().mark(t), true, m.e().rank()));
  for (std::size_t t = 0; t < n.e().nmarks(); ++t)
    ir.push_back(embed_product(prod.e(), cs, n.e().mark(t), false, m.e().rank()));
  return {SgMorphism(m, prod, Nil2Hom(m.e(), prod.e(), il), ee.inject[0]),
          SgMorphism(n, prod, Nil2Hom(n.e(), prod.e(), ir), ee.inject[1])};
}

SquareGroup free_sq(std::size_t s, std::size_t t) {
  return sg_product(v_free(s), a_tensor(FgAbelianGroup::free(t)));
}

SquareGroup zero_sq() { return from_abelian(FgAbelianGroup()); }

// ---------------------------------------------------------------------------
// Kernels, quotients, cokernels
// ---------------------------------------------------------------------------

SubSquareGroup kernel(const SgMorphism& f) {
  SubSquareGroup out;
  out.owner = f.src();
  out.e_gens = hom_kernel_gens(f.fe());
  auto [kee, incl] = f.fee().kernel();
  for (std::size_t i = 0; i < kee.rank(); ++i) out.ee_gens.push_back(incl.apply(kee.canonical_gen(i)));
  return out;
}

bool is_normal(const SubSquareGroup& k) {
  const SquareGroup& m = k.owner;
  Nil2Subgroup sub{m.e(), k.e_gens};
  if (!sub.is_normal()) return false;
  for (const auto& a : k.ee_gens)
    if (!sub.contains(m.apply_p(a))) return false;
  for (const auto& x : k.e_gens) {
    if (!m.ee().in_span(k.ee_gens, m.apply_h(x))) return false;
    for (std::size_t t = 0; t < m.e().nmarks(); ++t) {
      Nil2Element y = m.e().mark(t);
      if (!m.ee().in_span(k.ee_gens, m.cross(x, y))) return false;
      if (!m.ee().in_span(k.ee_gens, m.cross(y, x))) return false;
    }
  }
  return true;
}

namespace {

SgQuotient quotient_impl(const SquareGroup& m, const std::vector<Nil2Element>& e_kill,
                         const std::vector<FgabElement>& ee_kill_in) {
  Nil2Quotient eq = quotient_datum(m.e(), e_kill);
  std::vector<FgabElement> ee_kill = ee_kill_in;
  for (const auto& x : e_kill) {
    ee_kill.push_back(m.apply_h(x));
    for (std::size_t t = 0; t < m.e().nmarks(); ++t) {
      Nil2Element y = m.e().mark(t);
      FgabElement c1 = m.cross(x, y), c2 = m.cross(y, x);
      if (!c1.is_zero()) ee_kill.push_back(c1);
      if (!c2.is_zero()) ee_kill.push_back(c2);
    }
  }
  auto [eeq, eeproj] = quotient_by_elements(m.ee(), ee_kill);
  std::vector<Nil2Element> pvals;
  for (std::size_t i = 0; i < eeq.rank(); ++i) {
    // eeq pres gens are canonical gens of the old ee
    Vec lift = eeq.from_can().row(i);
    Nil2Element acc = eq.group.identity();
    for (std::size_t j = 0; j < eeq.ngens(); ++j)
      if (lift[j] != 0) acc = eq.group.mul(acc, eq.group.scaled(lift[j], eq.proj.apply(m.pvals()[j])));
    pvals.push_back(acc);
  }
  const Nil2Datum& Eq = eq.group;
  std::size_t nm_new = Eq.nmarks(), nm_old = m.e().nmarks();
  IntMatrix lift(nm_new, nm_old);
  for (std::size_t i = 0; i < Eq.rank(); ++i) lift.at(i, i) = 1;  // lattice unchanged
  const FgAbelianGroup& cq = Eq.central();
  for (std::size_t k = 0; k < cq.rank(); ++k) {
    Vec row = cq.from_can().row(k);  // over old central canonical gens
    for (std::size_t i = 0; i < m.e().central().rank(); ++i)
      lift.at(Eq.rank() + k, m.e().rank() + i) = row[i];
  }
  std::vector<FgabElement> hv;
  for (std::size_t t = 0; t < nm_new; ++t) hv.push_back(eeproj.apply(m.h().eval_word(lift.row(t))));
  SparseForm phi;
  {
    std::vector<std::vector<std::pair<std::size_t, Int>>> carriers(nm_old);
    for (std::size_t s = 0; s < nm_new; ++s)
      for (std::size_t a = 0; a < nm_old; ++a)
        if (lift.at(s, a) != 0) carriers[a].push_back({s, lift.at(s, a)});
    for (const auto& [ab, val] : m.h().phi()) {
      FgabElement v = eeproj.apply(val);
      if (v.is_zero()) continue;
      for (const auto& [s, ca] : carriers[ab.first])
        for (const auto& [t, cb] : carriers[ab.second]) {
          FgabElement add = v.scaled(ca * cb);
          auto key = std::make_pair(s, t);
          auto it = phi.find(key);
          if (it == phi.end())
            phi[key] = add;
          else
            it->second = it->second + add;
        }
    }
    for (auto it = phi.begin(); it != phi.end();)
      it = it->second.is_zero() ? phi.erase(it) : std::next(it);
  }
  QuadraticMap h(Eq, eeq, hv, phi);
  SgQuotient out;
  out.group = SquareGroup::make(Eq, eeq, pvals, h);
  out.proj = SgMorphism(m, out.group, eq.proj, eeproj);
  return out;
}

}  // namespace

SgQuotient quotient(const SquareGroup& m, const SubSquareGroup& k) {
  if (!is_normal(k)) throw SqgError("quotient: sub-square group not normal");
  return quotient_impl(m, k.e_gens, k.ee_gens);
}

SgQuotient sg_quotient_by(const SquareGroup& m, const std::vector<Nil2Element>& e_kill,
                          const std::vector<FgabElement>& ee_kill) {
  return quotient_impl(m, e_kill, ee_kill);
}

SgQuotient cokernel(const SgMorphism& f) {
  std::vector<Nil2Element> e_kill = f.fe().images();
  std::vector<FgabElement> ee_kill;
  for (std::size_t i = 0; i < f.src().ee().rank(); ++i)
    ee_kill.push_back(f.fee().apply(f.src().ee().canonical_gen(i)));
  return quotient_impl(f.dst(), e_kill, ee_kill);
}

bool is_epi(const SgMorphism& f) { return cokernel(f).group.is_zero_object(); }

bool is_mono(const SgMorphism& f) {
  return f.fee().is_injective() && hom_is_injective(f.fe());
}

// ---------------------------------------------------------------------------
// Coproduct
// ---------------------------------------------------------------------------

SgCoproduct coproduct(const SquareGroup& m, const SquareGroup& n) {
  Nil2Coproduct cp = nil2_coproduct(m.e(), n.e());
  std::vector<Nil2Element> kills;  // [P(a), y] = 0 both ways
  for (std::size_t a = 0; a < m.ee().rank(); ++a) {
    Nil2Element pm = cp.inj_left.apply(m.apply_p(m.ee().canonical_gen(a)));
    for (std::size_t t = 0; t < n.e().rank(); ++t)
      kills.push_back(cp.group.commutator(pm, cp.inj_right.apply(n.e().mark(t))));
  }
  for (std::size_t b = 0; b < n.ee().rank(); ++b) {
    Nil2Element pn = cp.inj_right.apply(n.apply_p(n.ee().canonical_gen(b)));
    for (std::size_t t = 0; t < m.e().rank(); ++t)
      kills.push_back(cp.group.commutator(pn, cp.inj_left.apply(m.e().mark(t))));
  }
  Nil2Quotient eq = quotient_datum(cp.group, kills);
  Nil2Hom inj_l = cp.inj_left.then(eq.proj);
  Nil2Hom inj_r = cp.inj_right.then(eq.proj);
  const Nil2Datum& E = eq.group;

  TensorAb mn = fgab_tensor(m.cokp(), n.cokp());
  TensorAb nm = fgab_tensor(n.cokp(), m.cokp());
  DirectSum ee = direct_sum({m.ee(), n.ee(), mn.group, nm.group});

  // commutator values of lifted cokp generators
  std::vector<Nil2Element> mn_comms, nm_comms;
  for (std::size_t a = 0; a < m.cokp().rank(); ++a)
    for (std::size_t b = 0; b < n.cokp().rank(); ++b)
      mn_comms.push_back(E.sub(
          E.mul(inj_l.apply(m.cokp_lift(m.cokp().canonical_gen(a))),
                inj_r.apply(n.cokp_lift(n.cokp().canonical_gen(b)))),
          E.mul(inj_r.apply(n.cokp_lift(n.cokp().canonical_gen(b))),
                inj_l.apply(m.cokp_lift(m.cokp().canonical_gen(a))))));
  for (std::size_t b = 0; b < n.cokp().rank(); ++b)
    for (std::size_t a = 0; a < m.cokp().rank(); ++a)
      nm_comms.push_back(E.inv(mn_comms[a * n.cokp().rank() + b]));

  std::vector<Nil2Element> pvals;
  for (std::size_t i = 0; i < ee.sum.rank(); ++i) {
    FgabElement g = ee.sum.canonical_gen(i);
    Nil2Element acc = E.mul(inj_l.apply(m.apply_p(ee.project[0].apply(g))),
                            inj_r.apply(n.apply_p(ee.project[1].apply(g))));
    auto add_block = [&](const TensorAb& blk, const std::vector<Nil2Element>& comms,
                         const FgabHom& proj) {
      FgabElement part = proj.apply(g);
      std::vector<FgabElement> pres;
      for (std::size_t j = 0; j < blk.group.ngens(); ++j) pres.push_back(blk.group.pres_gen(j));
      auto sol = blk.group.solve(pres, part);
      if (!sol) throw SqgError("coproduct: tensor lift failed");
      for (std::size_t j = 0; j < blk.group.ngens(); ++j)
        if ((*sol)[j] != 0) acc = E.mul(acc, E.scaled((*sol)[j], comms[j]));
    };
    add_block(mn, mn_comms, ee.project[2]);
    add_block(nm, nm_comms, ee.project[3]);
    pvals.push_back(acc);
  }

  std::vector<FgabElement> hv(E.nmarks(), ee.sum.zero());
  for (std::size_t i = 0; i < m.e().rank(); ++i)
    hv[i] = ee.inject[0].apply(m.apply_h(m.e().mark(i)));
  for (std::size_t i = 0; i < n.e().rank(); ++i)
    hv[m.e().rank() + i] = ee.inject[1].apply(n.apply_h(n.e().mark(i)));
  {
    const FgAbelianGroup& cq = E.central();
    const FgAbelianGroup& cold = cp.group.central();
    DirectSum cs = direct_sum({m.e().central(), n.e().central(), cp.pairing});
    TensorAb abpair = fgab_tensor(m.e().abelianization(), n.e().abelianization());
    std::vector<FgabElement> hold;
    for (std::size_t i = 0; i < cold.rank(); ++i) {
      FgabElement cm = cs.project[0].apply(cold.canonical_gen(i));
      FgabElement cn = cs.project[1].apply(cold.canonical_gen(i));
      FgabElement cpair = cs.project[2].apply(cold.canonical_gen(i));
      FgabElement val = ee.inject[0].apply(m.apply_h(m.e().central_elt(cm))) +
                        ee.inject[1].apply(n.apply_h(n.e().central_elt(cn)));
      std::vector<FgabElement> pres;
      for (std::size_t j = 0; j < abpair.group.ngens(); ++j)
        pres.push_back(abpair.group.pres_gen(j));
      auto sol = abpair.group.solve(pres, cpair);
      if (!sol) throw SqgError("coproduct: pairing lift failed");
      std::size_t idx = 0;
      for (std::size_t a = 0; a < m.e().abelianization().rank(); ++a)
        for (std::size_t b = 0; b < n.e().abelianization().rank(); ++b, ++idx) {
          if ((*sol)[idx] == 0) continue;
          // H([x,y]) = xbar (x) ybar - ybar (x) xbar in the pairing blocks
          FgabElement ca = m.cokp_proj_ab(a);
          FgabElement cb = n.cokp_proj_ab(b);
          FgabElement term =
              ee.inject[2].apply(mn.pair(ca, cb)) - ee.inject[3].apply(nm.pair(cb, ca));
          val = val + term.scaled((*sol)[idx]);
        }
      hold.push_back(val);
    }
    for (std::size_t k = 0; k < cq.rank(); ++k) {
      Vec row = cq.from_can().row(k);
      FgabElement val = ee.sum.zero();
      for (std::size_t i = 0; i < cold.rank(); ++i)
        if (row[i] != 0) val = val + hold[i].scaled(row[i]);
      hv[E.rank() + k] = val;
    }
  }
  SparseForm phi;
  auto mclass = [&](std::size_t i) { return m.cokp_class(m.e().mark(i)); };
  auto nclass = [&](std::size_t i) { return n.cokp_class(n.e().mark(i)); };
  for (std::size_t i = 0; i < m.e().rank(); ++i)
    for (std::size_t j = 0; j < m.e().rank(); ++j) {
      FgabElement v = ee.inject[0].apply(m.h().phi_at(i, j));
      if (!v.is_zero()) phi[{i, j}] = v;
    }
  for (std::size_t i = 0; i < n.e().rank(); ++i)
    for (std::size_t j = 0; j < n.e().rank(); ++j) {
      FgabElement v = ee.inject[1].apply(n.h().phi_at(i, j));
      if (!v.is_zero()) phi[{m.e().rank() + i, m.e().rank() + j}] = v;
    }
  for (std::size_t i = 0; i < m.e().rank(); ++i)
    for (std::size_t j = 0; j < n.e().rank(); ++j) {
      FgabElement v = ee.inject[2].apply(mn.pair(mclass(i), nclass(j)));
      if (!v.is_zero()) phi[{i, m.e().rank() + j}] = v;
      FgabElement w = ee.inject[3].apply(nm.pair(nclass(j), mclass(i)));
      if (!w.is_zero()) phi[{m.e().rank() + j, i}] = w;
    }
  QuadraticMap h(E, ee.sum, hv, phi);
  SgCoproduct out;
  out.group = SquareGroup::make(E, ee.sum, pvals, h, "coproduct");
  out.left = m;
  out.right = n;
  out.inj_left = SgMorphism(m, out.group, inj_l, ee.inject[0]);
  out.inj_right = SgMorphism(n, out.group, inj_r, ee.inject[1]);
  return out;
}

SgMorphism coproduct_induced(const SgCoproduct& cp, const SgMorphism& f, const SgMorphism& g) {
  const SquareGroup& m = cp.left;
  const SquareGroup& n = cp.right;
  const SquareGroup& X = f.dst();
  const Nil2Datum& E = cp.group.e();
  // deterministic reconstructions of the building blocks
  TensorAb mn = fgab_tensor(m.cokp(), n.cokp());
  TensorAb nm = fgab_tensor(n.cokp(), m.cokp());
  DirectSum ee = direct_sum({m.ee(), n.ee(), mn.group, nm.group});
  DirectSum cs = direct_sum({m.e().central(), n.e().central(),
                             fgab_tensor(m.e().abelianization(), n.e().abelianization()).group});
  TensorAb abpair = fgab_tensor(m.e().abelianization(), n.e().abelianization());
  auto lift_ab = [](const SquareGroup& s, std::size_t a) {
    return s.e().from_mark_coords(s.e().abelianization().from_can().row(a));
  };
  std::vector<Nil2Element> he;
  for (std::size_t i = 0; i < m.e().rank(); ++i) he.push_back(f.fe().apply(m.e().mark(i)));
  for (std::size_t i = 0; i < n.e().rank(); ++i) he.push_back(g.fe().apply(n.e().mark(i)));
  const FgAbelianGroup& cq = E.central();
  for (std::size_t k = 0; k < cq.rank(); ++k) {
    Vec row = cq.from_can().row(k);  // over the coproduct datum's central gens
    Nil2Element acc = X.e().identity();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] == 0) continue;
      FgabElement cold = cs.sum.canonical_gen(i);
      Nil2Element term = X.e().mul(
          f.fe().apply(m.e().central_elt(cs.project[0].apply(cold))),
          g.fe().apply(n.e().central_elt(cs.project[1].apply(cold))));
      FgabElement cpair = cs.project[2].apply(cold);
      std::vector<FgabElement> pres;
      for (std::size_t j = 0; j < abpair.group.ngens(); ++j)
        pres.push_back(abpair.group.pres_gen(j));
      auto sol = abpair.group.solve(pres, cpair);
      if (!sol) throw SqgError("coproduct_induced: pairing lift failed");
      std::size_t idx = 0;
      for (std::size_t a = 0; a < m.e().abelianization().rank(); ++a)
        for (std::size_t b = 0; b < n.e().abelianization().rank(); ++b, ++idx) {
          if ((*sol)[idx] == 0) continue;
          Nil2Element comm = X.e().sub(
              X.e().mul(f.fe().apply(lift_ab(m, a)), g.fe().apply(lift_ab(n, b))),
              X.e().mul(g.fe().apply(lift_ab(n, b)), f.fe().apply(lift_ab(m, a))));
          term = X.e().mul(term, X.e().scaled((*sol)[idx], comm));
        }
      acc = X.e().mul(acc, X.e().scaled(row[i], term));
    }
    he.push_back(acc);
  }
  Nil2Hom fe(E, X.e(), he);
  // ee level: blockwise, with pairing blocks mapped through the cross effect
  std::vector<FgabElement> fee_imgs;
  for (std::size_t i = 0; i < m.ee().rank(); ++i)
    fee_imgs.push_back(f.fee().apply(m.ee().canonical_gen(i)));
  for (std::size_t i = 0; i < n.ee().rank(); ++i)
    fee_imgs.push_back(g.fee().apply(n.ee().canonical_gen(i)));
  for (std::size_t a = 0; a < m.cokp().rank(); ++a)
    for (std::size_t b = 0; b < n.cokp().rank(); ++b)
      fee_imgs.push_back(X.cross(f.fe().apply(m.cokp_lift(m.cokp().canonical_gen(a))),
                                 g.fe().apply(n.cokp_lift(n.cokp().canonical_gen(b)))));
  for (std::size_t b = 0; b < n.cokp().rank(); ++b)
    for (std::size_t a = 0; a < m.cokp().rank(); ++a)
      fee_imgs.push_back(X.cross(g.fe().apply(n.cokp_lift(n.cokp().canonical_gen(b))),
                                 f.fe().apply(m.cokp_lift(m.cokp().canonical_gen(a)))));
  FgabHom fee = FgabHom::from_pres_images(cp.group.ee(), X.ee(), fee_imgs);
  return SgMorphism(cp.group, X, fe, fee);
}

FreeCover free_cover(const SquareGroup& m) {
  std::size_t s = m.e().nmarks();
  std::size_t t = m.ee().rank();
  SquareGroup V = v_free(s);
  SquareGroup AT = a_tensor(FgAbelianGroup::free(t));
  SquareGroup F = sg_product(V, AT);
  // e-level images: marks of F.e are [V lattice: s-gens, p-gens | AT lattice]
  // followed by the central generators of the product (V's commutators)
  std::vector<Nil2Element> fe_imgs;
  for (std::size_t k = 0; k < s; ++k) fe_imgs.push_back(m.e().mark(k));
  for (std::size_t k = 0; k < s; ++k)
    fe_imgs.push_back(m.apply_p(m.apply_h(m.e().mark(k))));
  for (std::size_t j = 0; j < t; ++j)
    fe_imgs.push_back(m.apply_p(m.ee().canonical_gen(j)));
  // central marks: product central = V.e().central() + trivial
  std::size_t csrank = F.e().central().rank();
  std::size_t idx = 0;
  std::vector<std::pair<std::size_t, std::size_t>> vpairs;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i + 1; j < s; ++j) vpairs.push_back({i, j});
  if (csrank != vpairs.size()) throw SqgError("free_cover: central layout mismatch");
  for (; idx < csrank; ++idx) {
    auto [i, j] = vpairs[idx];
    fe_imgs.push_back(m.e().sub(m.e().mul(m.e().mark(i), m.e().mark(j)),
                                m.e().mul(m.e().mark(j), m.e().mark(i))));
  }
  Nil2Hom fe(F.e(), m.e(), fe_imgs);
  // ee-level images per presentation generator of F.ee:
  // V block [Hs | (i,j) | HPHs], then AT block [Z^t | Z^t]
  std::vector<FgabElement> fee_imgs;
  for (std::size_t k = 0; k < s; ++k) fee_imgs.push_back(m.apply_h(m.e().mark(k)));
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) fee_imgs.push_back(m.h().phi_at(i, j));
  for (std::size_t k = 0; k < s; ++k) {
    FgabElement hx = m.apply_h(m.e().mark(k));
    fee_imgs.push_back(hx + m.t().apply(hx));
  }
  for (std::size_t j = 0; j < t; ++j) fee_imgs.push_back(m.ee().canonical_gen(j));
  for (std::size_t j = 0; j < t; ++j) fee_imgs.push_back(m.t().apply(m.ee().canonical_gen(j)));
  FgabHom fee = FgabHom::from_pres_images(F.ee(), m.ee(), fee_imgs);
  FreeCover out;
  out.cover = F;
  out.onto = SgMorphism(F, m, fe, fee);
  return out;
}

// ---------------------------------------------------------------------------
// Short exact sequences
// ---------------------------------------------------------------------------

Report validate_ses(const SgSes& s) {
  Report rep;
  rep.merge(s.incl.validate(), "incl-");
  rep.merge(s.proj.validate(), "proj-");
  rep.check(is_mono(s.incl), "incl-mono");
  rep.check(is_epi(s.proj), "proj-epi");
  SubSquareGroup k = kernel(s.proj);
  Nil2Subgroup img{s.incl.dst().e(), s.incl.fe().images()};
  Nil2Subgroup ker{s.incl.dst().e(), k.e_gens};
  bool ok = true;
  for (const auto& g : k.e_gens)
    if (!img.contains(g)) {
      rep.fail("exact-e", "kernel generator outside image");
      ok = false;
      break;
    }
  if (ok)
    for (const auto& g : s.incl.fe().images())
      if (!ker.contains(g)) {
        rep.fail("exact-e", "image generator outside kernel");
        ok = false;
        break;
      }
  if (ok) rep.pass("exact-e");
  std::vector<FgabElement> img_ee;
  for (std::size_t i = 0; i < s.incl.src().ee().rank(); ++i)
    img_ee.push_back(s.incl.fee().apply(s.incl.src().ee().canonical_gen(i)));
  ok = true;
  for (const auto& g : k.ee_gens)
    if (!s.incl.dst().ee().in_span(img_ee, g)) {
      rep.fail("exact-ee", "kernel generator outside image");
      ok = false;
      break;
    }
  if (ok)
    for (const auto& g : img_ee)
      if (!s.incl.dst().ee().in_span(k.ee_gens, g)) {
        rep.fail("exact-ee", "image generator outside kernel");
        ok = false;
        break;
      }
  if (ok) rep.pass("exact-ee");
  return rep;
}

namespace {

bool central_extension_inclusion(const std::vector<Nil2Element>& a_in_b, const SquareGroup& b) {
  for (const auto& a : a_in_b) {
    if (!b.e().is_central(a)) return false;
    Vec ac = b.e().mark_coords(a);
    for (std::size_t t = 0; t < b.e().nmarks(); ++t) {
      Vec et(b.e().nmarks(), Int(0));
      et[t] = 1;
      if (!b.h().phi_form(ac, et).is_zero()) return false;
      if (!b.h().phi_form(et, ac).is_zero()) return false;
    }
  }
  return true;
}

}  // namespace

CentralizerRefinement centralizer_refinement(const SgSes& s) {
  Report ses_check = validate_ses(s);
  if (!ses_check.ok()) throw SqgError("centralizer_refinement: input not exact");
  CentralizerRefinement out;
  const SquareGroup& A = s.incl.src();
  const SquareGroup& B = s.incl.dst();
  std::size_t nmA = A.e().nmarks();
  // linear conditions on mark coordinates: centrality in B and vanishing
  // cross effects against every B mark, both orders
  std::vector<FgAbelianGroup> targets;
  std::vector<std::vector<FgabElement>> cond_imgs;
  for (std::size_t i = 0; i < B.e().rank(); ++i) {
    Vec ei(B.e().rank(), Int(0));
    ei[i] = 1;
    std::vector<FgabElement> row;
    for (std::size_t t = 0; t < nmA; ++t)
      row.push_back(B.e().lambda_vec(s.incl.fe().images()[t].v, ei));
    targets.push_back(B.e().central());
    cond_imgs.push_back(row);
  }
  for (std::size_t u = 0; u < B.e().nmarks(); ++u) {
    Vec eu(B.e().nmarks(), Int(0));
    eu[u] = 1;
    std::vector<FgabElement> row1, row2;
    for (std::size_t t = 0; t < nmA; ++t) {
      Vec xt = B.e().mark_coords(s.incl.fe().images()[t]);
      row1.push_back(B.h().phi_form(xt, eu));
      row2.push_back(B.h().phi_form(eu, xt));
    }
    targets.push_back(B.ee());
    cond_imgs.push_back(row1);
    targets.push_back(B.ee());
    cond_imgs.push_back(row2);
  }
  DirectSum tsum = direct_sum(targets);
  FgAbelianGroup freeA = FgAbelianGroup::free(nmA);
  std::vector<FgabElement> himgs;
  for (std::size_t t = 0; t < nmA; ++t) {
    FgabElement acc = tsum.sum.zero();
    for (std::size_t c = 0; c < targets.size(); ++c)
      acc = acc + tsum.inject[c].apply(cond_imgs[c][t]);
    himgs.push_back(acc);
  }
  FgabHom cond = FgabHom::from_gen_images(freeA, tsum.sum, himgs);
  auto [kc, kincl] = cond.kernel();
  std::vector<Nil2Element> ap_gens;
  std::vector<Vec> kvecs;
  for (std::size_t i = 0; i < kc.rank(); ++i) {
    Vec w = kincl.apply(kc.canonical_gen(i)).coords;
    kvecs.push_back(w);
    ap_gens.push_back(A.e().from_mark_coords(w));
  }
  // combination defects are differences of A' elements, include them
  for (std::size_t i = 0; i < kvecs.size(); ++i)
    for (std::size_t j = i; j < kvecs.size(); ++j) {
      Nil2Element d = A.e().sub(A.e().mul(A.e().from_mark_coords(kvecs[i]),
                                          A.e().from_mark_coords(kvecs[j])),
                                A.e().from_mark_coords(add_vec(kvecs[i], kvecs[j])));
      if (!d.is_identity()) ap_gens.push_back(d);
    }
  std::vector<FgabElement> apee_gens;
  {
    std::vector<FgabElement> pimgs;
    for (std::size_t i = 0; i < A.ee().rank(); ++i) {
      Nil2Element pa = A.apply_p(A.ee().canonical_gen(i));
      pimgs.push_back(cond.apply(freeA.from_presentation_coords(A.e().mark_coords(pa))));
    }
    FgabHom pcond = FgabHom::from_gen_images(A.ee(), tsum.sum, pimgs);
    auto [kp, kpincl] = pcond.kernel();
    for (std::size_t i = 0; i < kp.rank(); ++i) apee_gens.push_back(kpincl.apply(kp.canonical_gen(i)));
  }
  // A' as an abstract square group: its e-level is abelian (everything there
  // commutes with all of B), so present it on the chosen generators
  {
    Nil2Datum idx_src = Nil2Datum::from_abelian(FgAbelianGroup::free(ap_gens.size()));
    Nil2Hom onto(idx_src, A.e(), [&] {
      std::vector<Nil2Element> v = ap_gens;
      return v;
    }());
    std::vector<Nil2Element> relgens = hom_kernel_gens(onto);
    std::vector<Vec> relrows;
    for (const auto& r : relgens) relrows.push_back(r.v);
    FgAbelianGroup ape = FgAbelianGroup::from_presentation(
        ap_gens.size(), IntMatrix::from_rows(relrows, ap_gens.size()));
    FgAbelianGroup apee;
    FgabHom apee_incl;
    {
      FgAbelianGroup freeT = FgAbelianGroup::free(apee_gens.size());
      FgabHom ontoe = FgabHom::from_gen_images(freeT, A.ee(), apee_gens);
      auto [kr, krincl] = ontoe.kernel();
      IntMatrix rel(kr.rank(), apee_gens.size());
      for (std::size_t i = 0; i < kr.rank(); ++i) rel.set_row(i, krincl.apply(kr.canonical_gen(i)).coords);
      apee = FgAbelianGroup::from_presentation(apee_gens.size(), rel);
      std::vector<FgabElement> incl_imgs;
      for (std::size_t i = 0; i < apee.rank(); ++i) {
        Vec row = apee.from_can().row(i);
        FgabElement acc = A.ee().zero();
        for (std::size_t j = 0; j < apee_gens.size(); ++j)
          if (row[j] != 0) acc = acc + apee_gens[j].scaled(row[j]);
        incl_imgs.push_back(acc);
      }
      apee_incl = FgabHom::from_gen_images(apee, A.ee(), incl_imgs);
    }
    Nil2Datum ape_datum = Nil2Datum::from_abelian(ape);
    // P': coordinates of P_A(apee gen) over the A' generators
    Nil2Subgroup sub{A.e(), ap_gens};
    auto coords_in_ap = [&](const Nil2Element& x) {
      std::vector<Vec> rows;
      for (const auto& g : ap_gens) rows.push_back(g.v);
      for (std::size_t k = 0; k < A.e().rel_basis().rows; ++k)
        rows.push_back(A.e().rel_basis().row(k));
      auto sol = solve_left(IntMatrix::from_rows(rows, A.e().rank()), x.v);
      if (!sol) throw SqgError("centralizer: element outside A' lattice span");
      Vec n0(ap_gens.size());
      for (std::size_t j = 0; j < ap_gens.size(); ++j) n0[j] = (*sol)[j];
      // adjust central part within the abelian subgroup
      Nil2Element w = A.e().identity();
      for (std::size_t j = 0; j < ap_gens.size(); ++j)
        if (n0[j] != 0) w = A.e().mul(w, A.e().scaled(n0[j], ap_gens[j]));
      if (!(w == x)) {
        // search correction among pure-central generators is folded into the
        // subgroup solve; accept the residual if it is a relation of ape
        Nil2Element diff = A.e().sub(x, w);
        if (!diff.is_identity() && !sub.contains(diff))
          throw SqgError("centralizer: coordinates not found");
      }
      return ape.from_presentation_coords(n0);
    };
    std::vector<Nil2Element> pvals;
    for (std::size_t i = 0; i < apee.rank(); ++i)
      pvals.push_back(ape_datum.lattice_elt(coords_in_ap(A.apply_p(apee_incl.apply(apee.canonical_gen(i)))).coords));
    std::vector<FgabElement> hvv;
    for (std::size_t k = 0; k < ape.rank(); ++k) {
      Vec row = ape.from_can().row(k);
      Nil2Element x = A.e().identity();
      for (std::size_t j = 0; j < ap_gens.size(); ++j)
        if (row[j] != 0) x = A.e().mul(x, A.e().scaled(row[j], ap_gens[j]));
      FgabElement hval = A.apply_h(x);
      auto sol = A.ee().solve(apee_gens, hval);
      if (!sol) throw SqgError("centralizer: H value outside A'_ee");
      hvv.push_back(apee.from_presentation_coords(*sol));
    }
    QuadraticMap hp(ape_datum, apee, hvv, {});
    out.aprime = SquareGroup::make(ape_datum, apee, pvals, hp, "centralizer");
    std::vector<Nil2Element> into_a;
    for (std::size_t k = 0; k < ape.rank(); ++k) {
      Vec row = ape.from_can().row(k);
      Nil2Element x = A.e().identity();
      for (std::size_t j = 0; j < ap_gens.size(); ++j)
        if (row[j] != 0) x = A.e().mul(x, A.e().scaled(row[j], ap_gens[j]));
      into_a.push_back(x);
    }
    out.aprime_into_a =
        SgMorphism(out.aprime, A, Nil2Hom(ape_datum, A.e(), into_a), apee_incl);
  }
  out.a_mod = quotient_impl(A, ap_gens, apee_gens);
  std::vector<Nil2Element> ap_in_b;
  for (const auto& g : ap_gens) ap_in_b.push_back(s.incl.fe().apply(g));
  std::vector<FgabElement> apee_in_b;
  for (const auto& g : apee_gens) apee_in_b.push_back(s.incl.fee().apply(g));
  out.b_mod = quotient_impl(B, ap_in_b, apee_in_b);

  Report rep;
  rep.merge(out.aprime_into_a.validate(), "A'-incl-");
  rep.merge(validate_square_group(out.aprime), "A'-");
  // columns: A' -> A -> A/A' and A' -> B -> B/A' are central extensions
  std::vector<Nil2Element> apa = out.aprime_into_a.fe().images();
  rep.check(central_extension_inclusion(apa, A), "column-A-central");
  rep.check(central_extension_inclusion(ap_in_b, B), "column-B-central");
  // bottom row: A/A' -> B/A' -> C central extension: image of A/A' central
  {
    std::vector<Nil2Element> imgs;
    for (const auto& g : s.incl.fe().images()) imgs.push_back(out.b_mod.proj.fe().apply(g));
    rep.check(central_extension_inclusion(imgs, out.b_mod.group), "bottom-row-central");
  }
  out.report = rep;
  return out;
}

// ---------------------------------------------------------------------------
// Hom enumeration
// ---------------------------------------------------------------------------

std::vector<SgMorphism> enumerate_sg_homs(const SquareGroup& a, const SquareGroup& m) {
  if (!m.levels_finite()) throw SqgError("enumerate_sg_homs: unsupported instance (infinite target)");
  std::vector<Nil2Element> elems = m.e().enumerate();
  std::vector<FgabElement> eelems = m.ee().enumerate();
  std::size_t nma = a.e().nmarks();
  std::size_t nga = a.ee().rank();
  std::vector<SgMorphism> out;
  std::vector<std::size_t> eidx(nma, 0), aidx(nga, 0);
  for (;;) {
    std::vector<Nil2Element> fe_imgs;
    for (std::size_t i = 0; i < nma; ++i) fe_imgs.push_back(elems[eidx[i]]);
    Nil2Hom fe(a.e(), m.e(), fe_imgs);
    if (fe.validate().ok()) {
      std::vector<FgabElement> fee_imgs;
      for (std::size_t i = 0; i < nga; ++i) fee_imgs.push_back(eelems[aidx[i]]);
      try {
        FgabHom fee = FgabHom::from_gen_images(a.ee(), m.ee(), fee_imgs);
        SgMorphism cand(a, m, fe, fee);
        if (cand.validate().ok()) out.push_back(cand);
      } catch (const SqgError&) {
      }
    }
    std::size_t i = 0;
    for (; i < nma; ++i) {
      if (++eidx[i] < elems.size()) break;
      eidx[i] = 0;
    }
    if (i < nma) continue;
    std::size_t j = 0;
    for (; j < nga; ++j) {
      if (++aidx[j] < eelems.size()) break;
      aidx[j] = 0;
    }
    if (j == nga) break;
  }
  return out;
}

std::vector<Nil2Element> linear_elements(const SquareGroup& m) {
  std::vector<Nil2Element> out;
  for (const auto& x : m.e().enumerate())
    if (m.apply_h(x).is_zero()) out.push_back(x);
  return out;
}

Report hom_count_checks(const SquareGroup& m) {
  Report rep;
  if (!m.levels_finite()) {
    rep.skip("hom-counts", "unsupported instance: infinite levels");
    return rep;
  }
  SquareGroup a2 = a_tensor(FgAbelianGroup::from_factors({2}));
  auto homs = enumerate_sg_homs(a2, m);
  Int count = 0;
  for (const auto& x : m.ee().enumerate())
    if (x.scaled(2).is_zero()) count += 1;
  rep.check(Int(homs.size()) == count, "Hom((Z/2)^t,M)=Hom(Z/2,M_ee)",
            "got " + std::to_string(homs.size()));
  return rep;
}

bool effective_epi_check(const SgMorphism& f, const std::vector<SquareGroup>& targets) {
  bool epi = is_epi(f);
  bool forces_zero = true;
  for (const auto& t : targets)
    for (const auto& h : enumerate_sg_homs(f.dst(), t))
      if (f.then(h).equals(SgMorphism::zero(f.src(), t)) &&
          !h.equals(SgMorphism::zero(f.dst(), t)))
        forces_zero = false;
  return epi == forces_zero;
}

}  // namespace sqg
