#include "sqg/tensor.hpp"

#include <algorithm>

namespace sqg {

// ---------------------------------------------------------------------------
// TensorProduct evaluation
// ---------------------------------------------------------------------------

FgabElement TensorProduct::ee_elt(const FgabElement& a, const FgabElement& b) const {
  return ee_ident.apply(ee_pair.pair(a, b));
}

Nil2Element TensorProduct::otbar(const FgabElement& a, const FgabElement& b) const {
  return result.apply_p(ee_elt(a, b));
}

Nil2Element TensorProduct::odot(const Nil2Element& x, const Nil2Element& y) const {
  const Nil2Datum& le = left.e();
  Vec coords = le.mark_coords(x);
  Nil2Element acc = result.e().identity();
  Vec prefix(le.nmarks(), Int(0));
  FgabElement hy = right.apply_h(y);
  for (std::size_t t = 0; t < le.nmarks(); ++t) {
    if (coords[t] == 0) continue;
    // m^c (.) y = m (.) (c y + binom(c,2) P H(y));  m (.) - is a homomorphism
    Nil2Element yprime = right.e().mul(right.e().scaled(coords[t], y),
                                       right.e().scaled(binom2(coords[t]), right.apply_p(hy)));
    Nil2Element piece = result.e().identity();
    Vec yc = right.e().mark_coords(yprime);
    for (std::size_t j = 0; j < right.e().nmarks(); ++j)
      if (yc[j] != 0) piece = result.e().mul(piece, result.e().scaled(yc[j], pair_dict[t][j]));
    acc = result.e().mul(acc, piece);
    // (prefix + m^c)(.)y picks up (m^c | prefix)_H (x-bar) H(y)
    Vec mvec(le.nmarks(), Int(0));
    mvec[t] = coords[t];
    FgabElement cr = left.h().phi_form(mvec, prefix);
    if (!cr.is_zero() && !hy.is_zero()) acc = result.e().mul(acc, otbar(cr, hy));
    prefix[t] = coords[t];
  }
  return acc;
}

Nil2Element TensorProduct::tr(const Nil2Element& x, const Nil2Element& y) const {
  return result.e().sub(odot(x, y),
                        otbar(left.apply_h(x), right.t().apply(right.apply_h(y))));
}

// ---------------------------------------------------------------------------
// shape detection and unit shortcuts
// ---------------------------------------------------------------------------

bool is_znil_shape(const SquareGroup& m) {
  if (m.e().rank() != 1 || !m.e().central().is_trivial() || m.e().rel_basis().rows != 0)
    return false;
  if (m.ee().rank() != 1 || m.ee().invariant_factors() != Vec{0}) return false;
  if (!m.pvals()[0].is_identity()) return false;
  if (!m.h().value(0).is_zero()) return false;
  return m.h().phi().size() == 1 && m.h().phi_at(0, 0) == m.ee().canonical_gen(0);
}

TensorProduct tensor_unit_left(const SquareGroup& n) {
  TensorProduct t;
  t.left = znil();
  t.right = n;
  t.result = n;
  t.pair_dict.assign(1, {});
  for (std::size_t j = 0; j < n.e().nmarks(); ++j) t.pair_dict[0].push_back(n.e().mark(j));
  t.ee_pair = fgab_tensor(t.left.ee(), n.ee());
  std::vector<FgabElement> ident;
  for (std::size_t c = 0; c < n.ee().rank(); ++c) ident.push_back(n.ee().canonical_gen(c));
  t.ee_ident = FgabHom::from_pres_images(t.ee_pair.group, n.ee(), ident);
  for (std::size_t j = 0; j < n.e().nmarks(); ++j) {
    TensorSymbol s;
    s.kind = TensorSymbol::Pair;
    s.x = t.left.e().mark(0);
    s.y = n.e().mark(j);
    t.symbols.push_back({{Int(1), s}});
  }
  return t;
}

TensorProduct tensor_unit_right(const SquareGroup& m) {
  TensorProduct t;
  t.left = m;
  t.right = znil();
  t.result = m;
  t.pair_dict.assign(m.e().nmarks(), {});
  for (std::size_t i = 0; i < m.e().nmarks(); ++i) t.pair_dict[i].push_back(m.e().mark(i));
  t.ee_pair = fgab_tensor(m.ee(), t.right.ee());
  std::vector<FgabElement> ident;
  for (std::size_t a = 0; a < m.ee().rank(); ++a) ident.push_back(m.ee().canonical_gen(a));
  t.ee_ident = FgabHom::from_pres_images(t.ee_pair.group, m.ee(), ident);
  for (std::size_t i = 0; i < m.e().nmarks(); ++i) {
    TensorSymbol s;
    s.kind = TensorSymbol::Pair;
    s.x = m.e().mark(i);
    s.y = t.right.e().mark(0);
    t.symbols.push_back({{Int(1), s}});
  }
  return t;
}

// ---------------------------------------------------------------------------
// V(n) (.) M : carrier G_n(M) x M_ee^n
// ---------------------------------------------------------------------------

TensorProduct tensor_vn(std::size_t n, const SquareGroup& m) {
  TensorProduct t;
  t.left = v_free(n);
  t.right = m;
  const std::size_t r = m.e().rank();
  const std::size_t cm = m.e().central().rank();
  std::size_t npairs = n * (n - 1) / 2;
  std::vector<FgAbelianGroup> parts;
  for (std::size_t k = 0; k < n; ++k) parts.push_back(m.e().central());
  for (std::size_t k = 0; k < npairs; ++k) parts.push_back(m.ee());
  for (std::size_t k = 0; k < n; ++k) parts.push_back(m.ee());
  DirectSum ct = direct_sum(parts);
  auto a_block = [&](std::size_t k, std::size_t l) {  // k < l
    return n + (k * n - k * (k + 1) / 2 + (l - k - 1));
  };
  auto b_block = [&](std::size_t k) { return n + npairs + k; };

  SparseForm beta;
  for (std::size_t k = 0; k < n; ++k)
    for (const auto& [ij, val] : m.e().beta())
      beta[{k * r + ij.first, k * r + ij.second}] = ct.inject[k].apply(val);
  for (const auto& [ij, val] : m.h().phi()) {
    if (ij.first >= r || ij.second >= r) continue;
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t k = 0; k < l; ++k) {
        auto key = std::make_pair(l * r + ij.first, k * r + ij.second);
        FgabElement add = ct.inject[a_block(k, l)].apply(val);
        auto it = beta.find(key);
        if (it == beta.end())
          beta[key] = add;
        else
          it->second = it->second + add;
      }
  }
  std::vector<Vec> rel_rows;
  std::vector<FgabElement> rho;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t s = 0; s < m.e().rel_basis().rows; ++s) {
      Vec row(n * r, Int(0));
      for (std::size_t j = 0; j < r; ++j) row[k * r + j] = m.e().rel_basis().at(s, j);
      rel_rows.push_back(row);
      rho.push_back(ct.inject[k].apply(m.e().rho_basis(s)));
    }
  Nil2Datum e(n * r, IntMatrix::from_rows(rel_rows, n * r), ct.sum, rho, beta);

  t.ee_pair = fgab_tensor(t.left.ee(), m.ee());
  FgAbelianGroup ee = t.ee_pair.group;
  t.ee_ident = FgabHom::identity(ee);
  const FgAbelianGroup& vee = t.left.ee();
  auto hs = [&](std::size_t k) { return vee.canonical_gen(k); };
  auto sij = [&](std::size_t i, std::size_t j) { return vee.canonical_gen(n + i * n + j); };
  auto hphs = [&](std::size_t k) { return vee.canonical_gen(n + n * n + k); };

  auto iota = [&](std::size_t k, const Nil2Element& x) {
    Vec v(n * r, Int(0));
    for (std::size_t i = 0; i < r; ++i) v[k * r + i] = x.v[i];
    return e.element(v, ct.inject[k].apply(x.c));
  };

  // P on ee presentation pairs (u in V_ee, c in M_ee)
  std::vector<Nil2Element> p_pres;
  for (std::size_t u = 0; u < vee.rank(); ++u)
    for (std::size_t c = 0; c < m.ee().rank(); ++c) {
      FgabElement cg = m.ee().canonical_gen(c);
      if (u < n) {
        p_pres.push_back(e.central_elt(ct.inject[b_block(u)].apply(cg)));
      } else if (u < n + n * n) {
        std::size_t i = (u - n) / n, j = (u - n) % n;
        if (i < j)
          p_pres.push_back(e.central_elt(ct.inject[a_block(i, j)].apply(m.t().apply(cg))));
        else if (i > j)
          p_pres.push_back(e.central_elt(ct.inject[a_block(j, i)].apply(cg)));
        else
          p_pres.push_back(iota(i, m.apply_p(cg)));
      } else {
        std::size_t k = u - n - n * n;
        p_pres.push_back(e.central_elt(ct.inject[b_block(k)].apply(cg - m.t().apply(cg))));
      }
    }
  std::vector<Nil2Element> pvals;
  for (std::size_t i = 0; i < ee.rank(); ++i) {
    Vec lift = ee.from_can().row(i);
    Nil2Element acc = e.identity();
    for (std::size_t j = 0; j < ee.ngens(); ++j)
      if (lift[j] != 0) acc = e.mul(acc, e.scaled(lift[j], p_pres[j]));
    pvals.push_back(acc);
  }

  std::vector<FgabElement> hv(e.nmarks(), ee.zero());
  std::vector<SymbolCombo> symbols;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < r; ++i) {
      Nil2Element mk = m.e().mark(i);
      hv[k * r + i] = t.ee_pair.pair(sij(k, k), m.apply_h(mk)) +
                      t.ee_pair.pair(hs(k), m.delta().apply(m.cokp_class(mk)));
      TensorSymbol s;
      s.kind = TensorSymbol::Pair;
      s.x = t.left.e().mark(k);
      s.y = mk;
      symbols.push_back({{Int(1), s}});
    }
  for (std::size_t g = 0; g < ct.sum.rank(); ++g) {
    FgabElement val = ee.zero();
    SymbolCombo combo;
    FgabElement cgen = ct.sum.canonical_gen(g);
    for (std::size_t k = 0; k < n; ++k) {
      FgabElement part = ct.project[k].apply(cgen);
      if (part.is_zero()) continue;
      Nil2Element z = m.e().central_elt(part);
      val = val + t.ee_pair.pair(sij(k, k), m.apply_h(z)) +
            t.ee_pair.pair(hs(k), m.delta().apply(m.cokp_class(z)));
      for (std::size_t mm = 0; mm < cm; ++mm)
        if (part.coords[mm] != 0) {
          TensorSymbol s;
          s.kind = TensorSymbol::Pair;
          s.x = t.left.e().mark(k);
          s.y = m.e().mark(r + mm);
          combo.push_back({part.coords[mm], s});
        }
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = k + 1; l < n; ++l) {
        FgabElement c = ct.project[a_block(k, l)].apply(cgen);
        if (c.is_zero()) continue;
        val = val + t.ee_pair.pair(sij(l, k), c) + t.ee_pair.pair(sij(k, l), m.t().apply(c));
        TensorSymbol s;
        s.kind = TensorSymbol::Otimes;
        s.a = sij(l, k);
        s.b = c;
        combo.push_back({Int(1), s});
      }
    for (std::size_t l = 0; l < n; ++l) {
      FgabElement c = ct.project[b_block(l)].apply(cgen);
      if (c.is_zero()) continue;
      FgabElement tc = m.t().apply(c);
      val = val + t.ee_pair.pair(hs(l), c + tc) - t.ee_pair.pair(hphs(l), tc);
      TensorSymbol s;
      s.kind = TensorSymbol::Otimes;
      s.a = hs(l);
      s.b = c;
      combo.push_back({Int(1), s});
    }
    hv[n * r + g] = val;
    symbols.push_back(combo);
  }
  SparseForm phi;
  for (const auto& [ij, val] : m.h().phi()) {
    if (ij.first >= r || ij.second >= r) continue;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l)
        phi[{k * r + ij.first, l * r + ij.second}] = t.ee_pair.pair(sij(k, l), val);
  }
  QuadraticMap h(e, ee, hv, phi);
  t.result = SquareGroup::make(e, ee, pvals, h, "tensor_vn");
  t.symbols = symbols;
  t.pair_dict.assign(t.left.e().nmarks(), {});
  std::vector<std::pair<std::size_t, std::size_t>> vpairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) vpairs.push_back({i, j});
  for (std::size_t lm = 0; lm < t.left.e().nmarks(); ++lm)
    for (std::size_t j = 0; j < m.e().nmarks(); ++j) {
      Nil2Element y = m.e().mark(j);
      if (lm < n) {
        t.pair_dict[lm].push_back(iota(lm, y));
      } else if (lm < 2 * n) {
        std::size_t k = lm - n;  // p_k (.) y = Hk (x-bar) Delta(y)
        t.pair_dict[lm].push_back(t.otbar(hs(k), m.delta().apply(m.cokp_class(y))));
      } else {
        // [s_i,s_j] = P((i,j)), so [s_i,s_j] (.) y = (i,j) (x-bar) Delta(y)
        auto [i, jj] = vpairs[lm - 2 * n];
        t.pair_dict[lm].push_back(t.otbar(sij(i, jj), m.delta().apply(m.cokp_class(y))));
      }
    }
  return t;
}

// ---------------------------------------------------------------------------
// A-tensor (.) M  =  (A tensor M_ee)-tensor
// ---------------------------------------------------------------------------

TensorProduct tensor_atensor(const FgAbelianGroup& a, const SquareGroup& m) {
  TensorProduct t;
  t.left = a_tensor(a);
  t.right = m;
  TensorAb g = fgab_tensor(a, m.ee());
  t.result = a_tensor(g.group);
  t.ee_pair = fgab_tensor(t.left.ee(), m.ee());
  DirectSum ds = direct_sum({a, a});
  DirectSum gg = direct_sum({g.group, g.group});
  std::vector<FgabElement> ident;
  for (std::size_t u = 0; u < ds.sum.rank(); ++u)
    for (std::size_t c = 0; c < m.ee().rank(); ++c) {
      FgabElement cg = m.ee().canonical_gen(c);
      FgabElement a0 = ds.project[0].apply(ds.sum.canonical_gen(u));
      FgabElement a1 = ds.project[1].apply(ds.sum.canonical_gen(u));
      ident.push_back(gg.inject[0].apply(g.pair(a0, cg)) -
                      gg.inject[1].apply(g.pair(a1, m.t().apply(cg))));
    }
  t.ee_ident = FgabHom::from_pres_images(t.ee_pair.group, t.result.ee(), ident);
  auto carrier = [&](const FgabElement& x) { return t.result.e().lattice_elt(x.coords); };
  t.pair_dict.assign(t.left.e().nmarks(), {});
  for (std::size_t i = 0; i < a.rank(); ++i)
    for (std::size_t j = 0; j < m.e().nmarks(); ++j) {
      Nil2Element y = m.e().mark(j);
      t.pair_dict[i].push_back(
          carrier(g.pair(a.canonical_gen(i), m.delta().apply(m.cokp_class(y)))));
    }
  for (std::size_t w = 0; w < g.group.rank(); ++w) {
    Vec lift = g.group.from_can().row(w);
    SymbolCombo combo;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < a.rank(); ++i)
      for (std::size_t c = 0; c < m.ee().rank(); ++c, ++idx) {
        if (lift[idx] == 0) continue;
        TensorSymbol s;
        s.kind = TensorSymbol::Otimes;
        s.a = ds.inject[0].apply(a.canonical_gen(i));
        s.b = m.ee().canonical_gen(c);
        combo.push_back({lift[idx], s});
      }
    t.symbols.push_back(combo);
  }
  return t;
}

// ---------------------------------------------------------------------------
// product of two tensors over the same right factor
// ---------------------------------------------------------------------------

namespace {

TensorProduct tensor_pair_product(const TensorProduct& ta, const TensorProduct& tb) {
  const SquareGroup& x = ta.left;
  const SquareGroup& yq = tb.left;
  const SquareGroup& n = ta.right;
  TensorProduct t;
  t.left = sg_product(x, yq);
  t.right = n;
  t.result = sg_product(ta.result, tb.result);
  auto res_inj = sg_product_injections(t.result, ta.result, tb.result);
  auto left_inj = sg_product_injections(t.left, x, yq);
  DirectSum cs = direct_sum({x.e().central(), yq.e().central()});
  DirectSum lee = direct_sum({x.ee(), yq.ee()});
  DirectSum ree = direct_sum({ta.result.ee(), tb.result.ee()});
  t.ee_pair = fgab_tensor(t.left.ee(), n.ee());
  std::vector<FgabElement> ident;
  for (std::size_t u = 0; u < t.left.ee().rank(); ++u)
    for (std::size_t c = 0; c < n.ee().rank(); ++c) {
      FgabElement cg = n.ee().canonical_gen(c);
      FgabElement ug = t.left.ee().canonical_gen(u);
      ident.push_back(
          ree.inject[0].apply(ta.ee_ident.apply(ta.ee_pair.pair(lee.project[0].apply(ug), cg))) +
          ree.inject[1].apply(tb.ee_ident.apply(tb.ee_pair.pair(lee.project[1].apply(ug), cg))));
    }
  t.ee_ident = FgabHom::from_pres_images(t.ee_pair.group, t.result.ee(), ident);
  std::size_t xr = x.e().rank(), yr = yq.e().rank();
  auto embedl = [&](const Nil2Element& v) { return res_inj[0].fe().apply(v); };
  auto embedr = [&](const Nil2Element& v) { return res_inj[1].fe().apply(v); };
  t.pair_dict.assign(t.left.e().nmarks(), {});
  for (std::size_t lm = 0; lm < t.left.e().nmarks(); ++lm)
    for (std::size_t j = 0; j < n.e().nmarks(); ++j) {
      Nil2Element ymark = n.e().mark(j);
      if (lm < xr)
        t.pair_dict[lm].push_back(embedl(ta.pair_dict[lm][j]));
      else if (lm < xr + yr)
        t.pair_dict[lm].push_back(embedr(tb.pair_dict[lm - xr][j]));
      else {
        FgabElement cg = cs.sum.canonical_gen(lm - xr - yr);
        Nil2Element vx = ta.odot(x.e().central_elt(cs.project[0].apply(cg)), ymark);
        Nil2Element vy = tb.odot(yq.e().central_elt(cs.project[1].apply(cg)), ymark);
        t.pair_dict[lm].push_back(t.result.e().mul(embedl(vx), embedr(vy)));
      }
    }
  auto remap = [&](const SymbolCombo& combo, bool is_left_factor) {
    SymbolCombo out;
    for (const auto& [coef, s] : combo) {
      TensorSymbol ns = s;
      if (s.kind == TensorSymbol::Pair)
        ns.x = (is_left_factor ? left_inj[0] : left_inj[1]).fe().apply(s.x);
      else
        ns.a = (is_left_factor ? lee.inject[0] : lee.inject[1]).apply(s.a);
      out.push_back({coef, ns});
    }
    return out;
  };
  for (std::size_t i = 0; i < ta.result.e().rank(); ++i)
    t.symbols.push_back(remap(ta.symbols[i], true));
  for (std::size_t i = 0; i < tb.result.e().rank(); ++i)
    t.symbols.push_back(remap(tb.symbols[i], false));
  DirectSum rcs = direct_sum({ta.result.e().central(), tb.result.e().central()});
  for (std::size_t gidx = 0; gidx < rcs.sum.rank(); ++gidx) {
    FgabElement cg = rcs.sum.canonical_gen(gidx);
    SymbolCombo combo;
    FgabElement pa = rcs.project[0].apply(cg);
    for (std::size_t mm = 0; mm < ta.result.e().central().rank(); ++mm)
      if (pa.coords[mm] != 0)
        for (const auto& [coef, s] : remap(ta.symbols[ta.result.e().rank() + mm], true))
          combo.push_back({coef * pa.coords[mm], s});
    FgabElement pb = rcs.project[1].apply(cg);
    for (std::size_t mm = 0; mm < tb.result.e().central().rank(); ++mm)
      if (pb.coords[mm] != 0)
        for (const auto& [coef, s] : remap(tb.symbols[tb.result.e().rank() + mm], false))
          combo.push_back({coef * pb.coords[mm], s});
    t.symbols.push_back(combo);
  }
  return t;
}

}  // namespace

TensorProduct tensor_free(std::size_t s, std::size_t t, const SquareGroup& n) {
  return tensor_pair_product(tensor_vn(s, n), tensor_atensor(FgAbelianGroup::free(t), n));
}

// ---------------------------------------------------------------------------
// morphisms out of tensors
// ---------------------------------------------------------------------------

SgMorphism induced_from_symbols(const TensorProduct& t, const SquareGroup& target,
                                const SymbolImages& im) {
  std::vector<Nil2Element> fe_imgs;
  for (const auto& combo : t.symbols) {
    Nil2Element acc = target.e().identity();
    for (const auto& [coef, s] : combo) {
      Nil2Element v = s.kind == TensorSymbol::Pair ? im.on_pair(s.x, s.y) : im.on_otimes(s.a, s.b);
      acc = target.e().mul(acc, target.e().scaled(coef, v));
    }
    fe_imgs.push_back(acc);
  }
  return SgMorphism(t.result, target, Nil2Hom(t.result.e(), target.e(), fe_imgs), im.fee);
}

SgMorphism tensor_morphism(const TensorProduct& src, const TensorProduct& dst,
                           const SgMorphism& f, const SgMorphism& g) {
  SymbolImages im;
  im.on_pair = [&dst, f, g](const Nil2Element& x, const Nil2Element& y) {
    return dst.odot(f.fe().apply(x), g.fe().apply(y));
  };
  im.on_otimes = [&dst, f, g](const FgabElement& a, const FgabElement& b) {
    return dst.otbar(f.fee().apply(a), g.fee().apply(b));
  };
  im.fee = hom_inverse(src.ee_ident)
               .then(tensor_hom(src.ee_pair, dst.ee_pair, f.fee(), g.fee()))
               .then(dst.ee_ident);
  return induced_from_symbols(src, dst.result, im);
}

SgMorphism free_sq_morphism(const SquareGroup& f, const SquareGroup& x,
                            const std::vector<Nil2Element>& e_targets,
                            const std::vector<FgabElement>& ee_targets) {
  std::size_t s = e_targets.size(), t = ee_targets.size();
  std::vector<Nil2Element> fe_imgs;
  for (std::size_t k = 0; k < s; ++k) fe_imgs.push_back(e_targets[k]);
  for (std::size_t k = 0; k < s; ++k) fe_imgs.push_back(x.apply_p(x.apply_h(e_targets[k])));
  for (std::size_t j = 0; j < t; ++j) fe_imgs.push_back(x.apply_p(ee_targets[j]));
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i + 1; j < s; ++j)
      fe_imgs.push_back(x.e().sub(x.e().mul(e_targets[i], e_targets[j]),
                                  x.e().mul(e_targets[j], e_targets[i])));
  Nil2Hom fe(f.e(), x.e(), fe_imgs);
  std::vector<FgabElement> fee_imgs;
  for (std::size_t k = 0; k < s; ++k) fee_imgs.push_back(x.apply_h(e_targets[k]));
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) fee_imgs.push_back(x.cross(e_targets[i], e_targets[j]));
  for (std::size_t k = 0; k < s; ++k) {
    FgabElement hx = x.apply_h(e_targets[k]);
    fee_imgs.push_back(hx + x.t().apply(hx));
  }
  for (std::size_t j = 0; j < t; ++j) fee_imgs.push_back(ee_targets[j]);
  for (std::size_t j = 0; j < t; ++j) fee_imgs.push_back(x.t().apply(ee_targets[j]));
  FgabHom fee = FgabHom::from_pres_images(f.ee(), x.ee(), fee_imgs);
  return SgMorphism(f, x, fe, fee);
}

// ---------------------------------------------------------------------------
// general algorithm: free presentation + right exactness
// ---------------------------------------------------------------------------

TensorProduct tensor_general(const SquareGroup& m, const SquareGroup& n) {
  FreeCover fc = free_cover(m);
  std::size_t s0 = m.e().nmarks(), t0 = m.ee().rank();
  TensorProduct t0p = tensor_free(s0, t0, n);
  SubSquareGroup k = kernel(fc.onto);
  // right exactness: quotient F0 (.) N by the image of K (.) N. That image is
  // generated by x' (.) y for the e-kernel generators x' and by k (x-bar) c,
  // i.e. P(k tensor c), for the ee-kernel generators k.
  std::vector<FgabElement> ee_kill;
  for (const auto& kg : k.ee_gens)
    for (std::size_t c = 0; c < n.ee().rank(); ++c)
      ee_kill.push_back(t0p.ee_ident.apply(t0p.ee_pair.pair(kg, n.ee().canonical_gen(c))));
  std::vector<Nil2Element> e_kill;
  for (const auto& xg : k.e_gens)
    for (std::size_t j = 0; j < n.e().nmarks(); ++j)
      e_kill.push_back(t0p.odot(xg, n.e().mark(j)));
  for (const auto& a : ee_kill) e_kill.push_back(t0p.result.apply_p(a));
  SgQuotient ck = sg_quotient_by(t0p.result, e_kill, ee_kill);

  TensorProduct out;
  out.left = m;
  out.right = n;
  out.result = ck.group;
  out.ee_pair = fgab_tensor(m.ee(), n.ee());
  std::size_t vee_rank = s0 + s0 * s0 + s0;
  auto lift_ee = [&](std::size_t j) {
    Vec pres(fc.cover.ee().ngens(), Int(0));
    pres[vee_rank + j] = 1;
    return fc.cover.ee().from_presentation_coords(pres);
  };
  std::vector<FgabElement> ident;
  for (std::size_t j = 0; j < m.ee().rank(); ++j)
    for (std::size_t c = 0; c < n.ee().rank(); ++c)
      ident.push_back(ck.proj.fee().apply(
          t0p.ee_ident.apply(t0p.ee_pair.pair(lift_ee(j), n.ee().canonical_gen(c)))));
  out.ee_ident = FgabHom::from_pres_images(out.ee_pair.group, ck.group.ee(), ident);
  if (!out.ee_ident.is_iso())
    throw SqgError("tensor_general: ee level is not the tensor of the ee levels");
  out.pair_dict.assign(m.e().nmarks(), {});
  for (std::size_t i = 0; i < m.e().nmarks(); ++i)
    for (std::size_t j = 0; j < n.e().nmarks(); ++j)
      out.pair_dict[i].push_back(ck.proj.fe().apply(t0p.pair_dict[i][j]));
  auto translate = [&](const SymbolCombo& combo) {
    SymbolCombo outc;
    for (const auto& [coef, s] : combo) {
      TensorSymbol ns = s;
      if (s.kind == TensorSymbol::Pair)
        ns.x = fc.onto.fe().apply(s.x);
      else
        ns.a = fc.onto.fee().apply(s.a);
      outc.push_back({coef, ns});
    }
    return outc;
  };
  for (std::size_t i = 0; i < ck.group.e().rank(); ++i)
    out.symbols.push_back(translate(t0p.symbols[i]));
  const FgAbelianGroup& cq = ck.group.e().central();
  for (std::size_t g = 0; g < cq.rank(); ++g) {
    Vec row = cq.from_can().row(g);
    SymbolCombo combo;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] == 0) continue;
      for (const auto& [coef, s] : translate(t0p.symbols[t0p.result.e().rank() + i]))
        combo.push_back({coef * row[i], s});
    }
    out.symbols.push_back(combo);
  }
  return out;
}

TensorProduct tensor(const SquareGroup& m, const SquareGroup& n) {
  if (is_znil_shape(m)) {
    TensorProduct t = tensor_unit_left(n);
    t.left = m;
    return t;
  }
  if (is_znil_shape(n)) {
    TensorProduct t = tensor_unit_right(m);
    t.right = n;
    return t;
  }
  if (m.shape() == "a_tensor") return tensor_atensor(m.e().abelianization(), n);
  return tensor_general(m, n);
}

// ---------------------------------------------------------------------------
// relation re-checks on generator instances
// ---------------------------------------------------------------------------

Report tensor_relations_check(const TensorProduct& t) {
  Report rep;
  const SquareGroup& M = t.left;
  const SquareGroup& N = t.right;
  const Nil2Datum& re = t.result.e();
  bool ok = true;
  // (1) a(x-bar)b central
  for (std::size_t a = 0; a < M.ee().rank() && ok; ++a)
    for (std::size_t b = 0; b < N.ee().rank() && ok; ++b)
      if (!re.is_central(t.otbar(M.ee().canonical_gen(a), N.ee().canonical_gen(b)))) {
        rep.fail("otimes-central", std::to_string(a) + "," + std::to_string(b));
        ok = false;
      }
  if (ok) rep.pass("otimes-central");
  // (2) right additivity
  ok = true;
  for (std::size_t i = 0; i < M.e().nmarks() && ok; ++i)
    for (std::size_t j = 0; j < N.e().nmarks() && ok; ++j)
      for (std::size_t j2 = 0; j2 < N.e().nmarks() && ok; ++j2) {
        Nil2Element x = M.e().mark(i), y1 = N.e().mark(j), y2 = N.e().mark(j2);
        if (!(t.odot(x, N.e().mul(y1, y2)) == re.mul(t.odot(x, y1), t.odot(x, y2)))) {
          rep.fail("right-additivity", std::to_string(i));
          ok = false;
        }
      }
  if (ok) rep.pass("right-additivity");
  // (3) left additivity with correction
  ok = true;
  for (std::size_t i = 0; i < M.e().nmarks() && ok; ++i)
    for (std::size_t i2 = 0; i2 < M.e().nmarks() && ok; ++i2)
      for (std::size_t j = 0; j < N.e().nmarks() && ok; ++j) {
        Nil2Element x1 = M.e().mark(i), x2 = M.e().mark(i2), y = N.e().mark(j);
        Nil2Element lhs = t.odot(M.e().mul(x1, x2), y);
        Nil2Element rhs = re.mul(re.mul(t.odot(x1, y), t.odot(x2, y)),
                                 t.otbar(M.cross(x2, x1), N.apply_h(y)));
        if (!(lhs == rhs)) {
          rep.fail("left-additivity", std::to_string(i) + "," + std::to_string(i2));
          ok = false;
        }
      }
  if (ok) rep.pass("left-additivity");
  // (4) x (.) P(b) = (x|x)_H (x-bar) b
  ok = true;
  for (std::size_t i = 0; i < M.e().nmarks() && ok; ++i)
    for (std::size_t b = 0; b < N.ee().rank() && ok; ++b) {
      Nil2Element x = M.e().mark(i);
      FgabElement bb = N.ee().canonical_gen(b);
      if (!(t.odot(x, N.apply_p(bb)) == t.otbar(M.cross(x, x), bb))) {
        rep.fail("x-odot-Pb", std::to_string(i) + "," + std::to_string(b));
        ok = false;
      }
    }
  if (ok) rep.pass("x-odot-Pb");
  // (5) P(a) (.) y = a (x-bar) Delta(y)
  ok = true;
  for (std::size_t a = 0; a < M.ee().rank() && ok; ++a)
    for (std::size_t j = 0; j < N.e().nmarks() && ok; ++j) {
      FgabElement aa = M.ee().canonical_gen(a);
      Nil2Element y = N.e().mark(j);
      if (!(t.odot(M.apply_p(aa), y) == t.otbar(aa, N.delta().apply(N.cokp_class(y))))) {
        rep.fail("Pa-odot-y", std::to_string(a) + "," + std::to_string(j));
        ok = false;
      }
    }
  if (ok) rep.pass("Pa-odot-y");
  // (6) T(a)(x-bar)T(b) = -(a(x-bar)b)
  ok = true;
  for (std::size_t a = 0; a < M.ee().rank() && ok; ++a)
    for (std::size_t b = 0; b < N.ee().rank() && ok; ++b) {
      FgabElement aa = M.ee().canonical_gen(a), bb = N.ee().canonical_gen(b);
      if (!(t.otbar(M.t().apply(aa), N.t().apply(bb)) == re.inv(t.otbar(aa, bb)))) {
        rep.fail("T-otimes-T", std::to_string(a) + "," + std::to_string(b));
        ok = false;
      }
    }
  if (ok) rep.pass("T-otimes-T");
  // H and P of the result on generator symbols
  ok = true;
  for (std::size_t i = 0; i < M.e().nmarks() && ok; ++i)
    for (std::size_t j = 0; j < N.e().nmarks() && ok; ++j) {
      Nil2Element x = M.e().mark(i), y = N.e().mark(j);
      FgabElement lhs = t.result.apply_h(t.odot(x, y));
      FgabElement rhs = t.ee_elt(M.cross(x, x), N.apply_h(y)) +
                        t.ee_elt(M.apply_h(x), N.delta().apply(N.cokp_class(y)));
      if (!(lhs == rhs)) {
        rep.fail("H-odot", std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
    }
  if (ok) rep.pass("H-odot");
  ok = true;
  for (std::size_t a = 0; a < M.ee().rank() && ok; ++a)
    for (std::size_t b = 0; b < N.ee().rank() && ok; ++b) {
      FgabElement aa = M.ee().canonical_gen(a), bb = N.ee().canonical_gen(b);
      FgabElement lhs = t.result.apply_h(t.otbar(aa, bb));
      FgabElement rhs = t.ee_elt(aa, bb) - t.ee_elt(M.t().apply(aa), N.t().apply(bb));
      if (!(lhs == rhs)) {
        rep.fail("H-otimes", std::to_string(a) + "," + std::to_string(b));
        ok = false;
      }
      if (ok && !(t.result.apply_p(t.ee_elt(aa, bb)) == t.otbar(aa, bb))) {
        rep.fail("P-otimes", std::to_string(a) + "," + std::to_string(b));
        ok = false;
      }
    }
  if (ok) rep.pass("H-otimes");
  return rep;
}

Report tr_relations_check(const TensorProduct& t) {
  Report rep;
  const SquareGroup& M = t.left;
  const SquareGroup& N = t.right;
  const Nil2Datum& re = t.result.e();
  bool ok = true;
  // (2') x |> (y1+y2) = x|>y1 + x|>y2 + H(x)(x-bar)(y2|y1)_H
  for (std::size_t i = 0; i < M.e().nmarks() && ok; ++i)
    for (std::size_t j = 0; j < N.e().nmarks() && ok; ++j)
      for (std::size_t j2 = 0; j2 < N.e().nmarks() && ok; ++j2) {
        Nil2Element x = M.e().mark(i), y1 = N.e().mark(j), y2 = N.e().mark(j2);
        Nil2Element lhs = t.tr(x, N.e().mul(y1, y2));
        Nil2Element rhs = re.mul(re.mul(t.tr(x, y1), t.tr(x, y2)),
                                 t.otbar(M.apply_h(x), N.cross(y2, y1)));
        if (!(lhs == rhs)) {
          rep.fail("tr-right", std::to_string(i));
          ok = false;
        }
      }
  if (ok) rep.pass("tr-right");
  // (3') (x1+x2) |> y = x1|>y + x2|>y
  ok = true;
  for (std::size_t i = 0; i < M.e().nmarks() && ok; ++i)
    for (std::size_t i2 = 0; i2 < M.e().nmarks() && ok; ++i2)
      for (std::size_t j = 0; j < N.e().nmarks() && ok; ++j) {
        Nil2Element x1 = M.e().mark(i), x2 = M.e().mark(i2), y = N.e().mark(j);
        if (!(t.tr(M.e().mul(x1, x2), y) == re.mul(t.tr(x1, y), t.tr(x2, y)))) {
          rep.fail("tr-left", std::to_string(i) + "," + std::to_string(i2));
          ok = false;
        }
      }
  if (ok) rep.pass("tr-left");
  // (4') x |> P(b) = Delta(x) (x-bar) b
  ok = true;
  for (std::size_t i = 0; i < M.e().nmarks() && ok; ++i)
    for (std::size_t b = 0; b < N.ee().rank() && ok; ++b) {
      Nil2Element x = M.e().mark(i);
      FgabElement bb = N.ee().canonical_gen(b);
      if (!(t.tr(x, N.apply_p(bb)) == t.otbar(M.delta().apply(M.cokp_class(x)), bb))) {
        rep.fail("tr-x-Pb", std::to_string(i) + "," + std::to_string(b));
        ok = false;
      }
    }
  if (ok) rep.pass("tr-x-Pb");
  // (5') P(a) |> y = a (x-bar) (y|y)_H
  ok = true;
  for (std::size_t a = 0; a < M.ee().rank() && ok; ++a)
    for (std::size_t j = 0; j < N.e().nmarks() && ok; ++j) {
      FgabElement aa = M.ee().canonical_gen(a);
      Nil2Element y = N.e().mark(j);
      if (!(t.tr(M.apply_p(aa), y) == t.otbar(aa, N.cross(y, y)))) {
        rep.fail("tr-Pa-y", std::to_string(a) + "," + std::to_string(j));
        ok = false;
      }
    }
  if (ok) rep.pass("tr-Pa-y");
  // H(x |> y) = Delta(x) tensor H(y) + H(x) tensor (y|y)_H
  ok = true;
  for (std::size_t i = 0; i < M.e().nmarks() && ok; ++i)
    for (std::size_t j = 0; j < N.e().nmarks() && ok; ++j) {
      Nil2Element x = M.e().mark(i), y = N.e().mark(j);
      FgabElement lhs = t.result.apply_h(t.tr(x, y));
      FgabElement rhs = t.ee_elt(M.delta().apply(M.cokp_class(x)), N.apply_h(y)) +
                        t.ee_elt(M.apply_h(x), N.cross(y, y));
      if (!(lhs == rhs)) {
        rep.fail("tr-H", std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
    }
  if (ok) rep.pass("tr-H");
  return rep;
}

Report sym_relations_check(const TensorProduct& t) {
  Report rep;
  const SquareGroup& M = t.left;
  const SquareGroup& N = t.right;
  bool ok = true;
  // (7) x(.)y - x|>y = H(x)(x-bar)TH(y)
  for (std::size_t i = 0; i < M.e().nmarks() && ok; ++i)
    for (std::size_t j = 0; j < N.e().nmarks() && ok; ++j) {
      Nil2Element x = M.e().mark(i), y = N.e().mark(j);
      Nil2Element lhs = t.result.e().sub(t.odot(x, y), t.tr(x, y));
      Nil2Element rhs = t.otbar(M.apply_h(x), N.t().apply(N.apply_h(y)));
      if (!(lhs == rhs)) {
        rep.fail("sym-defect", std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
    }
  if (ok) rep.pass("sym-defect");
  rep.merge(tr_relations_check(t), "");
  return rep;
}

// ---------------------------------------------------------------------------
// unit isomorphisms
// ---------------------------------------------------------------------------

SgMorphism unit_left_iso(const TensorProduct& t) {
  const SquareGroup& n = t.right;
  SymbolImages im;
  im.on_pair = [&n](const Nil2Element& x, const Nil2Element& y) {
    const Int& k = x.v[0];
    return n.e().mul(n.e().scaled(k, y), n.e().scaled(binom2(k), n.apply_p(n.apply_h(y))));
  };
  im.on_otimes = [&n](const FgabElement& a, const FgabElement& b) {
    return n.apply_p(b.scaled(a.coords[0]));
  };
  std::vector<FgabElement> imgs;
  for (std::size_t c = 0; c < n.ee().rank(); ++c) imgs.push_back(n.ee().canonical_gen(c));
  FgabHom collapse = FgabHom::from_pres_images(t.ee_pair.group, n.ee(), imgs);
  im.fee = hom_inverse(t.ee_ident).then(collapse);
  return induced_from_symbols(t, n, im);
}

SgMorphism unit_left_inv(const TensorProduct& t) {
  const SquareGroup& n = t.right;
  std::vector<Nil2Element> fe_imgs;
  for (std::size_t j = 0; j < n.e().nmarks(); ++j) fe_imgs.push_back(t.pair_dict[0][j]);
  std::vector<FgabElement> fee_imgs;
  for (std::size_t c = 0; c < n.ee().rank(); ++c)
    fee_imgs.push_back(t.ee_elt(t.left.ee().canonical_gen(0), n.ee().canonical_gen(c)));
  return SgMorphism(n, t.result, Nil2Hom(n.e(), t.result.e(), fe_imgs),
                    FgabHom::from_gen_images(n.ee(), t.result.ee(), fee_imgs));
}

SgMorphism unit_right_iso(const TensorProduct& t) {
  const SquareGroup& m = t.left;
  SymbolImages im;
  im.on_pair = [&m](const Nil2Element& x, const Nil2Element& y) {
    return m.e().scaled(y.v[0], x);
  };
  im.on_otimes = [&m](const FgabElement& a, const FgabElement& b) {
    return m.apply_p(a.scaled(b.coords[0]));
  };
  std::vector<FgabElement> imgs;
  for (std::size_t a = 0; a < m.ee().rank(); ++a) imgs.push_back(m.ee().canonical_gen(a));
  FgabHom collapse = FgabHom::from_pres_images(t.ee_pair.group, m.ee(), imgs);
  im.fee = hom_inverse(t.ee_ident).then(collapse);
  return induced_from_symbols(t, m, im);
}

SgMorphism unit_right_inv(const TensorProduct& t) {
  const SquareGroup& m = t.left;
  std::vector<Nil2Element> fe_imgs;
  for (std::size_t i = 0; i < m.e().nmarks(); ++i) fe_imgs.push_back(t.pair_dict[i][0]);
  std::vector<FgabElement> fee_imgs;
  for (std::size_t a = 0; a < m.ee().rank(); ++a)
    fee_imgs.push_back(t.ee_elt(m.ee().canonical_gen(a), t.right.ee().canonical_gen(0)));
  return SgMorphism(m, t.result, Nil2Hom(m.e(), t.result.e(), fe_imgs),
                    FgabHom::from_gen_images(m.ee(), t.result.ee(), fee_imgs));
}

// ---------------------------------------------------------------------------
// symmetry
// ---------------------------------------------------------------------------

SgMorphism symmetry_iso(const TensorProduct& mn, const TensorProduct& nm) {
  const SquareGroup& m = mn.left;
  const SquareGroup& n = mn.right;
  SymbolImages im;
  im.on_pair = [&](const Nil2Element& x, const Nil2Element& y) {
    return nm.result.e().sub(nm.odot(y, x),
                             nm.otbar(n.apply_h(y), m.t().apply(m.apply_h(x))));
  };
  im.on_otimes = [&](const FgabElement& a, const FgabElement& b) { return nm.otbar(b, a); };
  std::vector<FgabElement> swap_imgs;
  for (std::size_t a = 0; a < m.ee().rank(); ++a)
    for (std::size_t b = 0; b < n.ee().rank(); ++b)
      swap_imgs.push_back(nm.ee_pair.pair(n.ee().canonical_gen(b), m.ee().canonical_gen(a)));
  FgabHom swap = FgabHom::from_pres_images(mn.ee_pair.group, nm.ee_pair.group, swap_imgs);
  im.fee = hom_inverse(mn.ee_ident).then(swap).then(nm.ee_ident);
  return induced_from_symbols(mn, nm.result, im);
}

// ---------------------------------------------------------------------------
// associativity
// ---------------------------------------------------------------------------

namespace {

// expand w in (X (.) Y).ee through the pairing and apply fn(a-gen, b-gen)
Nil2Element expand_ee_pairs(const TensorProduct& txy, const FgabElement& w,
                            const Nil2Datum& target,
                            const std::function<Nil2Element(const FgabElement&, const FgabElement&)>& fn) {
  FgabElement wp = hom_inverse(txy.ee_ident).apply(w);
  std::vector<FgabElement> pres;
  for (std::size_t i = 0; i < txy.ee_pair.group.ngens(); ++i)
    pres.push_back(txy.ee_pair.group.pres_gen(i));
  auto sol = txy.ee_pair.group.solve(pres, wp);
  if (!sol) throw SqgError("expand_ee_pairs: solve failed");
  Nil2Element acc = target.identity();
  std::size_t idx = 0;
  for (std::size_t a = 0; a < txy.left.ee().rank(); ++a)
    for (std::size_t b = 0; b < txy.right.ee().rank(); ++b, ++idx)
      if ((*sol)[idx] != 0)
        acc = target.mul(acc, target.scaled((*sol)[idx],
                                            fn(txy.left.ee().canonical_gen(a),
                                               txy.right.ee().canonical_gen(b))));
  return acc;
}

FgabHom regroup_hom(const TensorProduct& tab, const TensorProduct& tab_c,
                    const TensorProduct& tbc, const TensorProduct& ta_bc) {
  // ((A.ee x B.ee) x C.ee) -> (A.ee x (B.ee x C.ee)) through the identifications
  const FgAbelianGroup& aee = tab.left.ee();
  const FgAbelianGroup& bee = tab.right.ee();
  const FgAbelianGroup& cee = tab_c.right.ee();
  FgabHom from = hom_inverse(tab_c.ee_ident);  // result.ee -> (AB).ee x C.ee
  // map pres pairs (w in (AB).ee, c) by expanding w over A x B
  std::vector<FgabElement> imgs;
  for (std::size_t w = 0; w < tab.result.ee().rank(); ++w)
    for (std::size_t c = 0; c < cee.rank(); ++c) {
      FgabElement wp = hom_inverse(tab.ee_ident).apply(tab.result.ee().canonical_gen(w));
      std::vector<FgabElement> pres;
      for (std::size_t i = 0; i < tab.ee_pair.group.ngens(); ++i)
        pres.push_back(tab.ee_pair.group.pres_gen(i));
      auto sol = tab.ee_pair.group.solve(pres, wp);
      if (!sol) throw SqgError("regroup: solve failed");
      FgabElement acc = ta_bc.result.ee().zero();
      std::size_t idx = 0;
      for (std::size_t a = 0; a < aee.rank(); ++a)
        for (std::size_t b = 0; b < bee.rank(); ++b, ++idx) {
          if ((*sol)[idx] == 0) continue;
          FgabElement inner = tbc.ee_elt(bee.canonical_gen(b), cee.canonical_gen(c));
          acc = acc + ta_bc.ee_elt(aee.canonical_gen(a), inner).scaled((*sol)[idx]);
        }
      imgs.push_back(acc);
    }
  return from.then(FgabHom::from_pres_images(tab_c.ee_pair.group, ta_bc.result.ee(), imgs));
}

}  // namespace

Nil2Element TensorTriple::triple(const Nil2Element& x, const Nil2Element& y,
                                 const Nil2Element& z) const {
  return ab_c.odot(ab.odot(x, y), z);
}

Nil2Element TensorTriple::otimes3(const FgabElement& a, const FgabElement& b,
                                  const FgabElement& c) const {
  return ab_c.otbar(ab.ee_elt(a, b), c);
}

TensorTriple triple_tensor(const SquareGroup& a, const SquareGroup& b, const SquareGroup& c) {
  TensorTriple t;
  t.ab = tensor(a, b);
  t.ab_c = tensor(t.ab.result, c);
  t.bc = tensor(b, c);
  t.a_bc = tensor(a, t.bc.result);
  const SquareGroup& A = a;
  const SquareGroup& C = c;
  // forward: (A(.)B)(.)C -> A(.)(B(.)C)
  {
    SymbolImages im;
    const TensorTriple* tt = &t;
    im.on_pair = [tt, &C](const Nil2Element& u, const Nil2Element& z) {
      // fold u over the marks of (A(.)B).e
      const TensorProduct& tab = tt->ab;
      const TensorProduct& ta_bc = tt->a_bc;
      const TensorProduct& tbc = tt->bc;
      const Nil2Datum& src = tab.result.e();
      const Nil2Datum& dst = ta_bc.result.e();
      Vec coords = src.mark_coords(u);
      FgabElement hz = C.apply_h(z);
      Nil2Element acc = dst.identity();
      Vec prefix(src.nmarks(), Int(0));
      for (std::size_t m = 0; m < src.nmarks(); ++m) {
        if (coords[m] == 0) continue;
        Nil2Element zprime = C.e().mul(C.e().scaled(coords[m], z),
                                       C.e().scaled(binom2(coords[m]), C.apply_p(hz)));
        // image of mark (.) z' via the mark's symbols
        Nil2Element piece = dst.identity();
        for (const auto& [coef, s] : tab.symbols[m]) {
          Nil2Element v;
          if (s.kind == TensorSymbol::Pair)
            v = ta_bc.odot(s.x, tbc.odot(s.y, zprime));
          else
            v = ta_bc.otbar(s.a, tbc.ee_elt(s.b, C.delta().apply(C.cokp_class(zprime))));
          piece = dst.mul(piece, dst.scaled(coef, v));
        }
        acc = dst.mul(acc, piece);
        Vec mv(src.nmarks(), Int(0));
        mv[m] = coords[m];
        FgabElement cr = tab.result.h().phi_form(mv, prefix);
        if (!cr.is_zero() && !hz.is_zero()) {
          // cr (x-bar) H(z) regrouped into A (.) (B (.) C)
          Nil2Element corr = expand_ee_pairs(
              tab, cr, dst, [&](const FgabElement& aa, const FgabElement& bb) {
                return ta_bc.otbar(aa, tbc.ee_elt(bb, hz));
              });
          acc = dst.mul(acc, corr);
        }
        prefix[m] = coords[m];
      }
      return acc;
    };
    im.on_otimes = [tt](const FgabElement& w, const FgabElement& cc) {
      // (a tensor b) (x-bar) c -> a (x-bar) (b tensor c)
      return expand_ee_pairs(tt->ab, w, tt->a_bc.result.e(),
                             [&](const FgabElement& aa, const FgabElement& bb) {
                               return tt->a_bc.otbar(aa, tt->bc.ee_elt(bb, cc));
                             });
    };
    im.fee = regroup_hom(t.ab, t.ab_c, t.bc, t.a_bc);
    t.assoc = induced_from_symbols(t.ab_c, t.a_bc.result, im);
  }
  // inverse: A(.)(B(.)C) -> (A(.)B)(.)C
  {
    SymbolImages im;
    const TensorTriple* tt = &t;
    im.on_pair = [tt, &A](const Nil2Element& x, const Nil2Element& w) {
      // x (.) w with w folded over the marks of (B(.)C).e; right-linear
      const TensorProduct& tbc = tt->bc;
      const TensorProduct& tab = tt->ab;
      const TensorProduct& tab_c = tt->ab_c;
      const Nil2Datum& src = tbc.result.e();
      const Nil2Datum& dst = tab_c.result.e();
      Vec coords = src.mark_coords(w);
      Nil2Element acc = dst.identity();
      for (std::size_t m = 0; m < src.nmarks(); ++m) {
        if (coords[m] == 0) continue;
        Nil2Element piece = dst.identity();
        for (const auto& [coef, s] : tbc.symbols[m]) {
          Nil2Element v;
          if (s.kind == TensorSymbol::Pair)
            v = tab_c.odot(tab.odot(x, s.x), s.y);
          else
            v = tab_c.otbar(tab.ee_elt(A.cross(x, x), s.a), s.b);
          piece = dst.mul(piece, dst.scaled(coef, v));
        }
        acc = dst.mul(acc, dst.scaled(coords[m], piece));
      }
      return acc;
    };
    im.on_otimes = [tt](const FgabElement& aa, const FgabElement& w) {
      // a (x-bar) (b tensor c) -> (a tensor b) (x-bar) c
      return expand_ee_pairs(tt->bc, w, tt->ab_c.result.e(),
                             [&](const FgabElement& bb, const FgabElement& cc) {
                               return tt->ab_c.otbar(tt->ab.ee_elt(aa, bb), cc);
                             });
    };
    // fee: inverse of the regroup
    im.fee = hom_inverse(regroup_hom(t.ab, t.ab_c, t.bc, t.a_bc));
    t.assoc_inv = induced_from_symbols(t.a_bc, t.ab_c.result, im);
  }
  return t;
}

Report verify_triangle(const SquareGroup& a, const SquareGroup& b) {
  Report rep;
  SquareGroup z = znil();
  TensorTriple t = triple_tensor(a, z, b);
  // kappa (.) Id : (A(.)Z)(.)B -> A(.)B  must equal  assoc then Id (.) iota
  TensorProduct tab = tensor(a, b);
  SgMorphism kappa = unit_right_iso(t.ab);
  SgMorphism path1 = tensor_morphism(t.ab_c, tab, kappa, SgMorphism::identity(b));
  SgMorphism iota = unit_left_iso(t.bc);
  SgMorphism path2 = t.assoc.then(tensor_morphism(t.a_bc, tab, SgMorphism::identity(a), iota));
  rep.check(path1.equals(path2), "triangle");
  rep.merge(path1.validate(), "triangle-path1-");
  return rep;
}

Report verify_pentagon(const SquareGroup& a, const SquareGroup& b, const SquareGroup& c,
                       const SquareGroup& d) {
  Report rep;
  TensorTriple t_abc = triple_tensor(a, b, c);
  const TensorProduct& tab = t_abc.ab;
  const TensorProduct& tbc = t_abc.bc;
  TensorProduct tcd = tensor(c, d);
  // path 1: assoc(AB, C, D) then assoc(A, B, C(.)D)
  TensorTriple t1 = triple_tensor(tab.result, c, d);
  TensorTriple t2 = triple_tensor(a, b, tcd.result);
  SgMorphism path1 = t1.assoc.then(t2.assoc);
  // path 2: (assoc(A,B,C) (.) Id_D) then assoc(A, BC, D) then (Id_A (.) assoc(B,C,D))
  TensorProduct t_abc_d = tensor(t_abc.ab_c.result, d);
  TensorProduct t_a_bc_d = tensor(t_abc.a_bc.result, d);
  SgMorphism step1 = tensor_morphism(t_abc_d, t_a_bc_d, t_abc.assoc, SgMorphism::identity(d));
  TensorTriple t3 = triple_tensor(a, tbc.result, d);
  TensorTriple t4 = triple_tensor(b, c, d);
  SgMorphism step3 =
      tensor_morphism(t3.a_bc, t2.a_bc, SgMorphism::identity(a), t4.assoc);
  SgMorphism path2 = step1.then(t3.assoc).then(step3);
  rep.check(path1.equals(path2), "pentagon");
  return rep;
}

Report verify_hexagons(const SquareGroup& a, const SquareGroup& b, const SquareGroup& c) {
  Report rep;
  TensorTriple t_abc = triple_tensor(a, b, c);
  // hexagon 1: (A(.)B)(.)C -> B(.)(C(.)A), two ways
  {
    TensorProduct tba = tensor(b, a);
    TensorTriple t_bac = triple_tensor(b, a, c);
    TensorTriple t_bca = triple_tensor(b, c, a);
    // way 1: (tau (.) Id) then assoc then (Id (.) tau)
    SgMorphism s1 = tensor_morphism(t_abc.ab_c, t_bac.ab_c,
                                    symmetry_iso(t_abc.ab, tba), SgMorphism::identity(c));
    TensorProduct tac = t_bac.bc;  // A (.) C
    TensorProduct tca = t_bca.bc;  // C (.) A
    SgMorphism s3 = tensor_morphism(t_bac.a_bc, t_bca.a_bc, SgMorphism::identity(b),
                                    symmetry_iso(tac, tca));
    SgMorphism way1 = s1.then(t_bac.assoc).then(s3);
    // way 2: assoc then tau(A, B(.)C) then assoc
    TensorProduct t_bc_a = tensor(t_abc.bc.result, a);
    SgMorphism tau2 = symmetry_iso(t_abc.a_bc, tensor(t_abc.bc.result, a));
    TensorTriple t_bc_a3 = triple_tensor(b, c, a);
    SgMorphism way2 = t_abc.assoc.then(tau2).then(t_bc_a3.assoc);
    rep.check(way1.equals(way2), "hexagon-1");
  }
  // hexagon 2: A(.)(B(.)C) -> (C(.)A)(.)B, two ways
  {
    TensorProduct tcb = tensor(c, b);
    TensorTriple t_acb = triple_tensor(a, c, b);
    TensorTriple t_cab = triple_tensor(c, a, b);
    // way 1: (Id (.) tau(B,C)) then assoc-inverse then (tau(A,C) (.) Id)
    SgMorphism s1 = tensor_morphism(t_abc.a_bc, t_acb.a_bc, SgMorphism::identity(a),
                                    symmetry_iso(t_abc.bc, tcb));
    TensorProduct tac = t_acb.ab;
    TensorProduct tca = t_cab.ab;
    SgMorphism s3 = tensor_morphism(t_acb.ab_c, t_cab.ab_c, symmetry_iso(tac, tca),
                                    SgMorphism::identity(b));
    SgMorphism way1 = s1.then(t_acb.assoc_inv).then(s3);
    // way 2: assoc-inverse then tau(A(.)B, C) then assoc-inverse
    TensorProduct t_c_ab = tensor(c, t_abc.ab.result);
    SgMorphism tau2 = symmetry_iso(t_abc.ab_c, t_c_ab);
    TensorTriple t_cab2 = triple_tensor(c, a, b);
    SgMorphism way2 = t_abc.assoc_inv.then(tau2).then(t_cab2.assoc_inv);
    rep.check(way1.equals(way2), "hexagon-2");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// closed-form cross-checks
// ---------------------------------------------------------------------------

namespace {

// morphism evaluating the symbols of `src` inside `dst` (same factor pair)
SgMorphism symbols_to_tensor(const TensorProduct& src, const TensorProduct& dst) {
  SymbolImages im;
  im.on_pair = [&dst](const Nil2Element& x, const Nil2Element& y) { return dst.odot(x, y); };
  im.on_otimes = [&dst](const FgabElement& a, const FgabElement& b) { return dst.otbar(a, b); };
  im.fee = hom_inverse(src.ee_ident).then(dst.ee_ident);
  return induced_from_symbols(src, dst.result, im);
}

}  // namespace

Report check_tensor_atensor(const FgAbelianGroup& a, const SquareGroup& m) {
  Report rep;
  TensorProduct closed = tensor_atensor(a, m);
  rep.merge(validate_square_group(closed.result), "closed-");
  rep.merge(tensor_relations_check(closed), "closed-rel-");
  TensorProduct general = tensor_general(a_tensor(a), m);
  SgMorphism iso = symbols_to_tensor(closed, general);
  rep.merge(iso.validate(), "iso-");
  rep.check(iso.is_iso(), "closed=general");
  return rep;
}

Report check_tensor_vn(std::size_t n, const SquareGroup& m) {
  Report rep;
  TensorProduct closed = tensor_vn(n, m);
  rep.merge(validate_square_group(closed.result), "closed-");
  rep.merge(tensor_relations_check(closed), "closed-rel-");
  // ee level is (M_ee)^{n^2+2n}
  {
    std::vector<FgAbelianGroup> copies(n * n + 2 * n, m.ee());
    DirectSum ds = direct_sum(copies);
    rep.check(closed.result.ee().invariant_factors() == ds.sum.invariant_factors(),
              "ee=(M_ee)^(n^2+2n)");
  }
  TensorProduct general = tensor_general(v_free(n), m);
  SgMorphism iso = symbols_to_tensor(closed, general);
  rep.merge(iso.validate(), "iso-");
  rep.check(iso.is_iso(), "closed=general");
  return rep;
}

TensorProduct tensor_zq(const SquareGroup& m) {
  // carrier: e = M_ee x M_e, ee = M_ee^3,
  // P(a,b,c) = (a + b - Tb, Pa), H(a,x) = (a + Ta + Delta(x), -Ta, H(x))
  TensorProduct t;
  t.left = zq();
  t.right = m;
  SquareGroup eepart = from_abelian(m.ee());
  DirectSum cs;  // central of the product datum below
  // build the product datum directly: from_abelian(M_ee) x M_e
  Nil2Datum mee_datum = Nil2Datum::from_abelian(m.ee());
  // reuse sg-level product on a throwaway pair to get the datum shape
  SquareGroup prod_shape = sg_product(eepart, from_abelian(FgAbelianGroup()));
  (void)prod_shape;
  // assemble datum by hand: lattice = ee-rank + M-rank, central = C_M
  std::size_t er = m.ee().rank(), mr = m.e().rank();
  SparseForm beta;
  for (const auto& [ij, val] : m.e().beta()) beta[{er + ij.first, er + ij.second}] = val;
  std::vector<Vec> rows;
  std::vector<FgabElement> rho;
  const Vec& ef = m.ee().invariant_factors();
  for (std::size_t i = 0; i < er; ++i)
    if (ef[i] != 0) {
      Vec row(er + mr, Int(0));
      row[i] = ef[i];
      rows.push_back(row);
      rho.push_back(m.e().central().zero());
    }
  for (std::size_t k = 0; k < m.e().rel_basis().rows; ++k) {
    Vec row(er + mr, Int(0));
    for (std::size_t j = 0; j < mr; ++j) row[er + j] = m.e().rel_basis().at(k, j);
    rows.push_back(row);
    rho.push_back(m.e().rho_basis(k));
  }
  Nil2Datum e(er + mr, IntMatrix::from_rows(rows, er + mr), m.e().central(), rho, beta);
  auto embed_a = [&](const FgabElement& a) {
    Vec v(er + mr, Int(0));
    for (std::size_t i = 0; i < er; ++i) v[i] = a.coords[i];
    return e.element(v, m.e().central().zero());
  };
  auto embed_x = [&](const Nil2Element& x) {
    Vec v(er + mr, Int(0));
    for (std::size_t i = 0; i < mr; ++i) v[er + i] = x.v[i];
    return e.element(v, x.c);
  };
  DirectSum ee = direct_sum({m.ee(), m.ee(), m.ee()});
  std::vector<Nil2Element> pvals;
  for (std::size_t i = 0; i < ee.sum.rank(); ++i) {
    FgabElement g = ee.sum.canonical_gen(i);
    FgabElement pa = ee.project[0].apply(g), pb = ee.project[1].apply(g),
                pc = ee.project[2].apply(g);
    pvals.push_back(e.mul(embed_a(pa + pb - m.t().apply(pb)), embed_x(m.apply_p(pc))));
  }
  std::vector<FgabElement> hv;
  for (std::size_t i = 0; i < er; ++i) {
    FgabElement a = m.ee().canonical_gen(i);
    hv.push_back(ee.inject[0].apply(a + m.t().apply(a)) - ee.inject[1].apply(m.t().apply(a)));
  }
  for (std::size_t j = 0; j < mr; ++j) {
    Nil2Element x = m.e().mark(j);
    hv.push_back(ee.inject[0].apply(m.delta().apply(m.cokp_class(x))) +
                 ee.inject[2].apply(m.apply_h(x)));
  }
  for (std::size_t mm = 0; mm < m.e().central().rank(); ++mm) {
    Nil2Element z = m.e().mark(mr + mm);
    hv.push_back(ee.inject[0].apply(m.delta().apply(m.cokp_class(z))) +
                 ee.inject[2].apply(m.apply_h(z)));
  }
  SparseForm phi;
  for (const auto& [ij, val] : m.h().phi()) {
    std::size_t s = ij.first < mr ? er + ij.first : er + mr + (ij.first - mr);
    std::size_t tt2 = ij.second < mr ? er + ij.second : er + mr + (ij.second - mr);
    phi[{s, tt2}] = ee.inject[2].apply(val);
  }
  QuadraticMap h(e, ee.sum, hv, phi);
  t.result = SquareGroup::make(e, ee.sum, pvals, h, "tensor_zq");
  t.ee_pair = fgab_tensor(t.left.ee(), m.ee());
  // Z^3 tensor M_ee -> M_ee^3 blockwise
  std::vector<FgabElement> ident;
  for (std::size_t u = 0; u < 3; ++u)
    for (std::size_t c = 0; c < er; ++c)
      ident.push_back(ee.inject[u].apply(m.ee().canonical_gen(c)));
  t.ee_ident = FgabHom::from_pres_images(t.ee_pair.group, ee.sum, ident);
  // dictionaries: zq marks are u = (1,0) and w = (0,1) = P(first ee generator)
  t.pair_dict.assign(2, {});
  for (std::size_t j = 0; j < m.e().nmarks(); ++j) {
    Nil2Element y = m.e().mark(j);
    t.pair_dict[0].push_back(embed_x(y));  // u (.) y = x-slot
    // w (.) y = P(e1) (.) y = e1 (x-bar) Delta(y) = a-slot Delta(y)
    t.pair_dict[1].push_back(embed_a(m.delta().apply(m.cokp_class(y))));
  }
  // symbols
  for (std::size_t i = 0; i < er; ++i) {
    TensorSymbol s;
    s.kind = TensorSymbol::Otimes;
    s.a = t.left.ee().canonical_gen(0);
    s.b = m.ee().canonical_gen(i);
    t.symbols.push_back({{Int(1), s}});
  }
  for (std::size_t j = 0; j < m.e().nmarks(); ++j) {
    TensorSymbol s;
    s.kind = TensorSymbol::Pair;
    s.x = t.left.e().mark(0);
    s.y = m.e().mark(j);
    if (j < mr)
      t.symbols.push_back({{Int(1), s}});
    else {
      // central marks sit after the lattice in the datum mark order
      t.symbols.push_back({{Int(1), s}});
    }
  }
  return t;
}

Report check_tensor_zq(const SquareGroup& m) {
  Report rep;
  TensorProduct closed = tensor_zq(m);
  rep.merge(validate_square_group(closed.result), "closed-");
  rep.merge(tensor_relations_check(closed), "closed-rel-");
  TensorProduct general = tensor_general(zq(), m);
  SgMorphism iso = symbols_to_tensor(closed, general);
  rep.merge(iso.validate(), "iso-");
  rep.check(iso.is_iso(), "closed=general");
  return rep;
}

Report check_tensor_ab_sq(const SquareGroup& a, const SquareGroup& b) {
  Report rep;
  if (!a.is_abelian_sg()) {
    rep.fail("precondition", "left factor not an abelian square group");
    return rep;
  }
  TensorProduct t = tensor_general(a, b);
  rep.check(t.result.is_abelian_sg(), "result-abelian");
  if (a.is_quadratic_zmodule())
    rep.check(t.result.is_quadratic_zmodule(), "result-qz");
  // pushout form of the e-level
  FgAbelianGroup aee = a.ee();
  TensorAb x1pre = fgab_tensor(aee, b.ee());
  // (A_ee tensor B_ee)/(Id + T tensor T)
  FgabHom tt = tensor_hom(x1pre, x1pre, a.t(), b.t());
  std::vector<FgabElement> kill;
  for (std::size_t i = 0; i < x1pre.group.rank(); ++i)
    kill.push_back(x1pre.group.canonical_gen(i) + tt.apply(x1pre.group.canonical_gen(i)));
  auto [x1, x1proj] = quotient_by_elements(x1pre.group, kill);
  FgAbelianGroup ae = a.e().abelianization();
  TensorAb x2 = fgab_tensor(ae, b.cokp());
  TensorAb q0 = fgab_tensor(aee, b.cokp());
  DirectSum push = direct_sum({x1, x2.group});
  std::vector<FgabElement> glue;
  for (std::size_t i = 0; i < aee.rank(); ++i)
    for (std::size_t j = 0; j < b.cokp().rank(); ++j) {
      // (Id tensor Delta)(u) in X1 minus (P tensor Id)(u) in X2
      FgabElement u1 = x1proj.apply(x1pre.pair(aee.canonical_gen(i),
                                               b.delta().apply(b.cokp().canonical_gen(j))));
      FgabElement u2 = x2.pair(a.e().ab_class(a.apply_p(aee.canonical_gen(i))),
                               b.cokp().canonical_gen(j));
      glue.push_back(push.inject[0].apply(u1) - push.inject[1].apply(u2));
    }
  auto [po, poproj] = quotient_by_elements(push.sum, glue);
  // the comparison map onto the e-level of the tensor
  FgAbelianGroup te = t.result.e().abelianization();
  std::vector<FgabElement> imgs;
  for (std::size_t i = 0; i < push.sum.rank(); ++i) {
    FgabElement g = push.sum.canonical_gen(i);
    // X1 part: u tensor v -> class of u (x-bar) v; X2 part: x tensor ybar -> x (.) y
    FgabElement part1 = push.project[0].apply(g);
    FgabElement part2 = push.project[1].apply(g);
    Nil2Element acc = t.result.e().identity();
    // lift X1 through the quotient of the tensor square
    std::vector<FgabElement> pres1;
    for (std::size_t k = 0; k < x1.ngens(); ++k) pres1.push_back(x1.pres_gen(k));
    auto s1 = x1.solve(pres1, part1);
    if (!s1) throw SqgError("check_tensor_ab_sq: X1 lift failed");
    std::size_t idx = 0;
    for (std::size_t p = 0; p < aee.rank(); ++p)
      for (std::size_t q = 0; q < b.ee().rank(); ++q, ++idx) {
        // x1 presentation gens are the canonical gens of the tensor square
        (void)q;
      }
    // expand over tensor-square canonical generators
    for (std::size_t k = 0; k < x1.ngens(); ++k) {
      if ((*s1)[k] == 0) continue;
      // tensor-square canonical gen k expands over presentation pairs
      Vec lift = x1pre.group.from_can().row(k);
      std::size_t id2 = 0;
      for (std::size_t p = 0; p < aee.rank(); ++p)
        for (std::size_t q = 0; q < b.ee().rank(); ++q, ++id2)
          if (lift[id2] != 0)
            acc = t.result.e().mul(
                acc, t.result.e().scaled((*s1)[k] * lift[id2],
                                         t.otbar(aee.canonical_gen(p), b.ee().canonical_gen(q))));
    }
    std::vector<FgabElement> pres2;
    for (std::size_t k = 0; k < x2.group.ngens(); ++k) pres2.push_back(x2.group.pres_gen(k));
    auto s2 = x2.group.solve(pres2, part2);
    if (!s2) throw SqgError("check_tensor_ab_sq: X2 lift failed");
    std::size_t id3 = 0;
    for (std::size_t p = 0; p < ae.rank(); ++p)
      for (std::size_t q = 0; q < b.cokp().rank(); ++q, ++id3)
        if ((*s2)[id3] != 0) {
          Nil2Element xe = a.e().from_mark_coords(ae.from_can().row(p));
          Nil2Element ye = b.cokp_lift(b.cokp().canonical_gen(q));
          acc = t.result.e().mul(acc, t.result.e().scaled((*s2)[id3], t.odot(xe, ye)));
        }
    imgs.push_back(te.from_presentation_coords(t.result.e().mark_coords(acc)));
  }
  FgabHom compare = FgabHom::from_pres_images(po, te, [&] {
    std::vector<FgabElement> v;
    for (std::size_t i = 0; i < push.sum.rank(); ++i) {
      // compose with the pushout projection ordering: po pres gens are the
      // canonical gens of push.sum
      v.push_back(imgs[i]);
    }
    return v;
  }());
  rep.check(compare.is_iso(), "pushout-form");
  return rep;
}

Report check_tensor_qz(const SquareGroup& a, const SquareGroup& b) {
  Report rep;
  if (!a.is_abelian_sg() || !b.is_quadratic_zmodule()) {
    rep.fail("precondition", "need abelian square group and quadratic Z-module");
    return rep;
  }
  TensorAb l = fgab_tensor(a.ee(), b.ee());
  FgabHom tau = tensor_hom(l, l, a.t(), b.t());
  SquareGroup epart = e_involution(l.group, tau);
  TensorAb coks = fgab_tensor(a.cokp(), b.cokp());
  SquareGroup closed = sg_product(epart, from_abelian(coks.group));
  rep.merge(validate_square_group(closed), "closed-");
  TensorProduct t = tensor_general(a, b);
  // explicit morphism closed -> general
  std::vector<Nil2Element> fe_imgs;
  // marks of closed.e: E-part lattice, coks lattice, no centrals
  FgabHom idplus = FgabHom::identity(l.group).plus(tau);
  std::vector<FgabElement> kplus;
  for (std::size_t i = 0; i < l.group.rank(); ++i)
    kplus.push_back(idplus.apply(l.group.canonical_gen(i)));
  auto [qcok, qproj] = quotient_by_elements(l.group, kplus);
  for (std::size_t k = 0; k < qcok.rank(); ++k) {
    // lift through the quotient: its presentation generators are L generators
    Vec lift = qcok.from_can().row(k);
    Nil2Element acc = t.result.e().identity();
    for (std::size_t w = 0; w < l.group.rank(); ++w) {
      if (lift[w] == 0) continue;
      Vec lw = l.group.from_can().row(w);
      std::size_t idx = 0;
      for (std::size_t p = 0; p < a.ee().rank(); ++p)
        for (std::size_t q = 0; q < b.ee().rank(); ++q, ++idx)
          if (lw[idx] != 0)
            acc = t.result.e().mul(
                acc, t.result.e().scaled(lift[w] * lw[idx],
                                         t.otbar(a.ee().canonical_gen(p), b.ee().canonical_gen(q))));
    }
    fe_imgs.push_back(acc);
  }
  for (std::size_t k = 0; k < coks.group.rank(); ++k) {
    Vec lift = coks.group.from_can().row(k);
    Nil2Element acc = t.result.e().identity();
    std::size_t idx = 0;
    for (std::size_t p = 0; p < a.cokp().rank(); ++p)
      for (std::size_t q = 0; q < b.cokp().rank(); ++q, ++idx)
        if (lift[idx] != 0)
          acc = t.result.e().mul(
              acc, t.result.e().scaled(lift[idx], t.odot(a.cokp_lift(a.cokp().canonical_gen(p)),
                                                         b.cokp_lift(b.cokp().canonical_gen(q)))));
    fe_imgs.push_back(acc);
  }
  Nil2Hom fe(closed.e(), t.result.e(), fe_imgs);
  // ee: L + 0 -> tensor ee
  std::vector<FgabElement> fee_imgs;
  for (std::size_t w = 0; w < l.group.rank(); ++w) {
    Vec lw = l.group.from_can().row(w);
    FgabElement acc = t.result.ee().zero();
    std::size_t idx = 0;
    for (std::size_t p = 0; p < a.ee().rank(); ++p)
      for (std::size_t q = 0; q < b.ee().rank(); ++q, ++idx)
        if (lw[idx] != 0)
          acc = acc + t.ee_elt(a.ee().canonical_gen(p), b.ee().canonical_gen(q)).scaled(lw[idx]);
    fee_imgs.push_back(acc);
  }
  FgabHom fee = FgabHom::from_gen_images(closed.ee(), t.result.ee(), fee_imgs);
  SgMorphism iso(closed, t.result, fe, fee);
  rep.merge(iso.validate(), "iso-");
  rep.check(iso.is_iso(), "closed=general");
  return rep;
}

Report check_znil_monoidal(const std::vector<std::string>& s, const std::vector<std::string>& sp) {
  Report rep;
  SquareGroup m = znil_set(s);
  SquareGroup n = znil_set(sp);
  TensorProduct t = tensor_general(m, n);
  std::vector<std::string> pair_names;
  for (const auto& x : s)
    for (const auto& y : sp) pair_names.push_back(x + "." + y);
  SquareGroup zp = znil_set(pair_names);
  rep.check(t.result.ee().invariant_factors() == zp.ee().invariant_factors(),
            "ee-rank=(|S||S'|)^2");
  // delta: (s,s') -> s (.) s' on generators
  std::size_t ns = s.size(), np = sp.size();
  std::vector<Nil2Element> fe_imgs;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < np; ++j) fe_imgs.push_back(t.pair_dict[i][j]);
  // commutator marks of zp in lex order
  for (std::size_t u = 0; u < ns * np; ++u)
    for (std::size_t v = u + 1; v < ns * np; ++v)
      fe_imgs.push_back(t.result.e().sub(t.result.e().mul(fe_imgs[u], fe_imgs[v]),
                                         t.result.e().mul(fe_imgs[v], fe_imgs[u])));
  Nil2Hom fe(zp.e(), t.result.e(), fe_imgs);
  std::vector<FgabElement> fee_imgs;
  for (std::size_t u = 0; u < ns * np; ++u)
    for (std::size_t v = 0; v < ns * np; ++v) {
      std::size_t i = u / np, ip = u % np, j = v / np, jp = v % np;
      // (s_i, s'_ip) tensor (s_j, s'_jp) -> (s_i tensor s_j) tensor (s'_ip tensor s'_jp)
      fee_imgs.push_back(t.ee_elt(m.ee().canonical_gen(i * ns + j),
                                  n.ee().canonical_gen(ip * np + jp)));
    }
  FgabHom fee = FgabHom::from_gen_images(zp.ee(), t.result.ee(), fee_imgs);
  SgMorphism delta(zp, t.result, fe, fee);
  rep.merge(delta.validate(), "delta-");
  rep.check(delta.is_iso(), "znil-monoidal-iso");
  return rep;
}

// ---------------------------------------------------------------------------
// bilinear maps
// ---------------------------------------------------------------------------

Report validate_bilinear(const BilinearMap& phi) {
  Report rep;
  const SquareGroup& A = phi.a;
  const SquareGroup& B = phi.b;
  const SquareGroup& C = phi.c;
  bool ok = true;
  for (std::size_t i = 0; i < A.e().nmarks() && ok; ++i)
    for (std::size_t j = 0; j < B.e().nmarks() && ok; ++j) {
      Nil2Element x = A.e().mark(i), y = B.e().mark(j);
      // left/right linearity samples
      for (std::size_t i2 = 0; i2 < A.e().nmarks() && ok; ++i2) {
        Nil2Element x2 = A.e().mark(i2);
        if (!(phi.phi_l(A.e().mul(x, x2), y) ==
              C.e().mul(phi.phi_l(x, y), phi.phi_l(x2, y)))) {
          rep.fail("phi_l-left-linear", std::to_string(i) + "," + std::to_string(i2));
          ok = false;
        }
      }
      for (std::size_t j2 = 0; j2 < B.e().nmarks() && ok; ++j2) {
        Nil2Element y2 = B.e().mark(j2);
        if (!(phi.phi_r(x, B.e().mul(y, y2)) ==
              C.e().mul(phi.phi_r(x, y), phi.phi_r(x, y2)))) {
          rep.fail("phi_r-right-linear", std::to_string(j) + "," + std::to_string(j2));
          ok = false;
        }
      }
      if (!ok) break;
      FgabElement hl = C.apply_h(phi.phi_l(x, y));
      FgabElement rl = phi.phi_ee(A.cross(x, x), B.apply_h(y)) +
                       phi.phi_ee(A.apply_h(x), B.delta().apply(B.cokp_class(y)));
      if (!(hl == rl)) {
        rep.fail("H-phi_l", std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
      FgabElement hr = C.apply_h(phi.phi_r(x, y));
      FgabElement rr = phi.phi_ee(A.delta().apply(A.cokp_class(x)), B.apply_h(y)) +
                       phi.phi_ee(A.apply_h(x), B.cross(y, y));
      if (ok && !(hr == rr)) {
        rep.fail("H-phi_r", std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
      Nil2Element diff = C.e().sub(phi.phi_l(x, y), phi.phi_r(x, y));
      if (ok && !(diff == C.apply_p(phi.phi_ee(A.apply_h(x), B.t().apply(B.apply_h(y)))))) {
        rep.fail("phi_l-phi_r", std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
    }
  if (ok) rep.pass("bilinear-e-laws");
  ok = true;
  for (std::size_t a = 0; a < A.ee().rank() && ok; ++a)
    for (std::size_t j = 0; j < B.e().nmarks() && ok; ++j) {
      FgabElement aa = A.ee().canonical_gen(a);
      Nil2Element y = B.e().mark(j);
      if (!(phi.phi_l(A.apply_p(aa), y) ==
            C.apply_p(phi.phi_ee(aa, B.delta().apply(B.cokp_class(y)))))) {
        rep.fail("phi_l-P", std::to_string(a) + "," + std::to_string(j));
        ok = false;
      }
    }
  for (std::size_t b = 0; b < B.ee().rank() && ok; ++b)
    for (std::size_t i = 0; i < A.e().nmarks() && ok; ++i) {
      FgabElement bb = B.ee().canonical_gen(b);
      Nil2Element x = A.e().mark(i);
      if (!(phi.phi_r(x, B.apply_p(bb)) ==
            C.apply_p(phi.phi_ee(A.delta().apply(A.cokp_class(x)), bb)))) {
        rep.fail("phi_r-P", std::to_string(b) + "," + std::to_string(i));
        ok = false;
      }
    }
  for (std::size_t a = 0; a < A.ee().rank() && ok; ++a)
    for (std::size_t b = 0; b < B.ee().rank() && ok; ++b) {
      FgabElement aa = A.ee().canonical_gen(a), bb = B.ee().canonical_gen(b);
      if (!(C.apply_p(phi.phi_ee(A.t().apply(aa), B.t().apply(bb))) ==
            C.e().inv(C.apply_p(phi.phi_ee(aa, bb))))) {
        rep.fail("P-phi_ee-T", std::to_string(a) + "," + std::to_string(b));
        ok = false;
      }
    }
  if (ok) rep.pass("bilinear-P-laws");
  return rep;
}

SgMorphism bilinear_factorize(const BilinearMap& phi, const TensorProduct& t) {
  Report v = validate_bilinear(phi);
  if (!v.ok()) throw SqgError("bilinear_factorize: " + v.first_failure()->name +
                              " violated [" + v.first_failure()->witness + "]");
  SymbolImages im;
  im.on_pair = phi.phi_l;
  im.on_otimes = [&phi](const FgabElement& a, const FgabElement& b) {
    return phi.c.apply_p(phi.phi_ee(a, b));
  };
  std::vector<FgabElement> fee_imgs;
  for (std::size_t a = 0; a < phi.a.ee().rank(); ++a)
    for (std::size_t b = 0; b < phi.b.ee().rank(); ++b)
      fee_imgs.push_back(phi.phi_ee(phi.a.ee().canonical_gen(a), phi.b.ee().canonical_gen(b)));
  im.fee = hom_inverse(t.ee_ident)
               .then(FgabHom::from_pres_images(t.ee_pair.group, phi.c.ee(), fee_imgs));
  return induced_from_symbols(t, phi.c, im);
}

// ---------------------------------------------------------------------------
// exactness instruments
// ---------------------------------------------------------------------------

SgMorphism sg_pairing(const SquareGroup& prod, const SgMorphism& f, const SgMorphism& g) {
  auto injs = sg_product_injections(prod, f.dst(), g.dst());
  std::vector<Nil2Element> fe_imgs;
  for (std::size_t i = 0; i < f.src().e().nmarks(); ++i) {
    Nil2Element x = f.src().e().mark(i);
    fe_imgs.push_back(prod.e().mul(injs[0].fe().apply(f.fe().apply(x)),
                                   injs[1].fe().apply(g.fe().apply(x))));
  }
  FgabHom fee = f.fee().then(injs[0].fee()).plus(g.fee().then(injs[1].fee()));
  return SgMorphism(f.src(), prod, Nil2Hom(f.src().e(), prod.e(), fe_imgs), fee);
}

Report tensor_preserves_products(const SquareGroup& m, const SquareGroup& b, const SquareGroup& c) {
  Report rep;
  SquareGroup bc = sg_product(b, c);
  auto projs = sg_product_projections(bc, b, c);
  TensorProduct t_all = tensor(m, bc);
  TensorProduct t_b = tensor(m, b);
  TensorProduct t_c = tensor(m, c);
  SgMorphism p1 = tensor_morphism(t_all, t_b, SgMorphism::identity(m), projs[0]);
  SgMorphism p2 = tensor_morphism(t_all, t_c, SgMorphism::identity(m), projs[1]);
  SquareGroup target = sg_product(t_b.result, t_c.result);
  SgMorphism cmp = sg_pairing(target, p1, p2);
  rep.merge(cmp.validate(), "compare-");
  rep.check(cmp.is_iso(), "M(.)(BxC)=(M(.)B)x(M(.)C)");
  return rep;
}

Report tensor_right_exact(const SgSes& ses, const SquareGroup& m) {
  Report rep;
  const SquareGroup& b1 = ses.incl.src();
  const SquareGroup& b = ses.incl.dst();
  const SquareGroup& b2 = ses.proj.dst();
  TensorProduct t1 = tensor(m, b1);
  TensorProduct tb = tensor(m, b);
  TensorProduct t2 = tensor(m, b2);
  SgMorphism mu = tensor_morphism(t1, tb, SgMorphism::identity(m), ses.incl);
  SgMorphism sg = tensor_morphism(tb, t2, SgMorphism::identity(m), ses.proj);
  rep.merge(mu.validate(), "mu-");
  rep.merge(sg.validate(), "sigma-");
  rep.check(is_epi(sg), "right-term-epi");
  // exactness in the middle: coker(mu) isomorphic to M (.) B2 via sigma
  SgQuotient ck = cokernel(mu);
  // sigma factors through the cokernel; the induced map must be iso
  std::vector<Nil2Element> fe_imgs;
  for (std::size_t i = 0; i < ck.group.e().nmarks(); ++i) {
    // lift mark through the projection: marks of the quotient datum keep the
    // lattice of tb and quotiented centrals; use proj-section via marks of tb
    (void)i;
  }
  // direct check: kernel of sigma = image of mu
  SubSquareGroup k = kernel(sg);
  Nil2Subgroup img{tb.result.e(), mu.fe().images()};
  bool ok = true;
  for (const auto& g : k.e_gens)
    if (!img.contains(g)) {
      rep.fail("exact-middle-e", "kernel generator outside image");
      ok = false;
      break;
    }
  if (ok) rep.pass("exact-middle-e");
  std::vector<FgabElement> img_ee;
  for (std::size_t i = 0; i < t1.result.ee().rank(); ++i)
    img_ee.push_back(mu.fee().apply(t1.result.ee().canonical_gen(i)));
  ok = true;
  for (const auto& g : k.ee_gens)
    if (!tb.result.ee().in_span(img_ee, g)) {
      rep.fail("exact-middle-ee", "kernel generator outside image");
      ok = false;
      break;
    }
  if (ok) rep.pass("exact-middle-ee");
  return rep;
}

Report tensor_coproduct_sequence(const SquareGroup& m, const SquareGroup& a,
                                 const SquareGroup& b) {
  Report rep;
  SgCoproduct cp = coproduct(a, b);
  TensorProduct t_cp = tensor(m, cp.group);
  TensorProduct ta = tensor(m, a);
  TensorProduct tb = tensor(m, b);
  // right-hand map onto the product
  SquareGroup prod = sg_product(ta.result, tb.result);
  auto projm = sg_pairing(
      prod,
      tensor_morphism(t_cp, ta, SgMorphism::identity(m),
                      [&] {
                        // retraction of the coproduct onto a (Id, 0)
                        return coproduct_induced(cp, SgMorphism::identity(a),
                                                 SgMorphism::zero(b, a));
                      }()),
      tensor_morphism(t_cp, tb, SgMorphism::identity(m),
                      coproduct_induced(cp, SgMorphism::zero(a, b), SgMorphism::identity(b))));
  rep.merge(projm.validate(), "proj-");
  rep.check(is_epi(projm), "onto-product");
  // left-hand term: (M_ee tensor CokA tensor CokB)-tensor, mapped by
  // m (x-bar)-ing against the coproduct pairing block
  TensorAb ck = fgab_tensor(a.cokp(), b.cokp());
  TensorAb mk = fgab_tensor(m.ee(), ck.group);
  SquareGroup lterm = a_tensor(mk.group);
  // inclusion: (c tensor (xbar tensor ybar)) -> c (x-bar) [x,y]
  std::vector<Nil2Element> fe_imgs;
  const FgAbelianGroup& lt = mk.group;
  for (std::size_t k = 0; k < lt.rank(); ++k) {
    Vec lift = lt.from_can().row(k);
    Nil2Element acc = t_cp.result.e().identity();
    std::size_t idx = 0;
    for (std::size_t p = 0; p < m.ee().rank(); ++p)
      for (std::size_t q = 0; q < ck.group.rank(); ++q, ++idx) {
        if (lift[idx] == 0) continue;
        // expand the cok pair generator
        Vec l2 = ck.group.from_can().row(q);
        std::size_t id2 = 0;
        for (std::size_t xa = 0; xa < a.cokp().rank(); ++xa)
          for (std::size_t yb = 0; yb < b.cokp().rank(); ++yb, ++id2) {
            if (l2[id2] == 0) continue;
            Nil2Element xe = cp.inj_left.fe().apply(a.cokp_lift(a.cokp().canonical_gen(xa)));
            Nil2Element ye = cp.inj_right.fe().apply(b.cokp_lift(b.cokp().canonical_gen(yb)));
            Nil2Element comm = cp.group.e().sub(cp.group.e().mul(xe, ye),
                                                cp.group.e().mul(ye, xe));
            // c (x-bar) applied along the second slot: otbar(c, H-image...)
            // [x,y] = P((x|y)_H) in the coproduct, so c (x-bar) (x|y)_H works
            FgabElement cross = cp.group.cross(xe, ye);
            acc = t_cp.result.e().mul(
                acc, t_cp.result.e().scaled(lift[idx] * l2[id2],
                                            t_cp.otbar(m.ee().canonical_gen(p), cross)));
            (void)comm;
          }
      }
    fe_imgs.push_back(acc);
  }
  // ee level of the left term: (mk + mk) -> tensor ee
  DirectSum lee = direct_sum({mk.group, mk.group});
  std::vector<FgabElement> fee_imgs;
  for (std::size_t u = 0; u < lee.sum.rank(); ++u) {
    FgabElement g0 = lee.project[0].apply(lee.sum.canonical_gen(u));
    FgabElement g1 = lee.project[1].apply(lee.sum.canonical_gen(u));
    auto emit = [&](const FgabElement& g, bool twisted) {
      FgabElement acc = t_cp.result.ee().zero();
      std::vector<FgabElement> pres;
      for (std::size_t i = 0; i < mk.group.ngens(); ++i) pres.push_back(mk.group.pres_gen(i));
      auto sol = mk.group.solve(pres, g);
      if (!sol) throw SqgError("coproduct sequence: lift failed");
      std::size_t idx = 0;
      for (std::size_t p = 0; p < m.ee().rank(); ++p)
        for (std::size_t q = 0; q < ck.group.rank(); ++q, ++idx) {
          if ((*sol)[idx] == 0) continue;
          Vec l2 = ck.group.from_can().row(q);
          std::size_t id2 = 0;
          for (std::size_t xa = 0; xa < a.cokp().rank(); ++xa)
            for (std::size_t yb = 0; yb < b.cokp().rank(); ++yb, ++id2) {
              if (l2[id2] == 0) continue;
              Nil2Element xe = cp.inj_left.fe().apply(a.cokp_lift(a.cokp().canonical_gen(xa)));
              Nil2Element ye = cp.inj_right.fe().apply(b.cokp_lift(b.cokp().canonical_gen(yb)));
              FgabElement cross = cp.group.cross(xe, ye);
              FgabElement me = m.ee().canonical_gen(p);
              FgabElement term = twisted
                                     ? t_cp.ee_elt(m.t().apply(me),
                                                   cp.group.t().apply(cross)).scaled(-1)
                                     : t_cp.ee_elt(me, cross);
              acc = acc + term.scaled((*sol)[idx] * l2[id2]);
            }
        }
      return acc;
    };
    fee_imgs.push_back(emit(g0, false) + emit(g1, true));
  }
  SgMorphism incl(lterm, t_cp.result, Nil2Hom(lterm.e(), t_cp.result.e(), fe_imgs),
                  FgabHom::from_gen_images(lterm.ee(), t_cp.result.ee(), fee_imgs));
  rep.merge(incl.validate(), "incl-");
  rep.check(is_mono(incl), "left-term-mono");
  // exactness in the middle
  SubSquareGroup k = kernel(projm);
  Nil2Subgroup img{t_cp.result.e(), incl.fe().images()};
  bool ok = true;
  for (const auto& g : k.e_gens)
    if (!img.contains(g)) {
      rep.fail("coproduct-seq-exact-e", "kernel generator outside image");
      ok = false;
      break;
    }
  if (ok) rep.pass("coproduct-seq-exact-e");
  std::vector<FgabElement> img_ee;
  for (std::size_t i = 0; i < lterm.ee().rank(); ++i)
    img_ee.push_back(incl.fee().apply(lterm.ee().canonical_gen(i)));
  ok = true;
  for (const auto& g : k.ee_gens)
    if (!t_cp.result.ee().in_span(img_ee, g)) {
      rep.fail("coproduct-seq-exact-ee", "kernel generator outside image");
      ok = false;
      break;
    }
  if (ok) rep.pass("coproduct-seq-exact-ee");
  return rep;
}

Report tensor_mono_projective(const SgSes& ses, const SquareGroup& a) {
  Report rep;
  TensorProduct t1 = tensor(a, ses.incl.src());
  TensorProduct tb = tensor(a, ses.incl.dst());
  SgMorphism mu = tensor_morphism(t1, tb, SgMorphism::identity(a), ses.incl);
  rep.merge(mu.validate(), "mu-");
  rep.check(is_mono(mu), "A-tensor-mu-mono");
  return rep;
}

// ---------------------------------------------------------------------------
// naturality and compatibility properties
// ---------------------------------------------------------------------------

Report delta_multiplicativity(const TensorProduct& t) {
  Report rep;
  bool ok = true;
  for (std::size_t i = 0; i < t.left.e().nmarks() && ok; ++i)
    for (std::size_t j = 0; j < t.right.e().nmarks() && ok; ++j) {
      Nil2Element x = t.left.e().mark(i), y = t.right.e().mark(j);
      FgabElement lhs = t.result.delta().apply(t.result.cokp_class(t.odot(x, y)));
      FgabElement rhs = t.ee_elt(t.left.delta().apply(t.left.cokp_class(x)),
                                 t.right.delta().apply(t.right.cokp_class(y)));
      if (!(lhs == rhs)) {
        rep.fail("Delta-multiplicative", std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
    }
  if (ok) rep.pass("Delta-multiplicative");
  return rep;
}

Report n_star_tensor_compat(const TensorProduct& t, const Int& n) {
  Report rep;
  Nil2Hom nm = n_star(t.left, n);
  Nil2Hom nt = n_star(t.result, n);
  bool ok = true;
  for (std::size_t i = 0; i < t.left.e().nmarks() && ok; ++i)
    for (std::size_t j = 0; j < t.right.e().nmarks() && ok; ++j) {
      Nil2Element lhs = t.odot(nm.apply(t.left.e().mark(i)), t.right.e().mark(j));
      Nil2Element rhs = nt.apply(t.pair_dict[i][j]);
      if (!(lhs == rhs)) {
        rep.fail("n*-compat-pairs", std::to_string(i) + "," + std::to_string(j));
        ok = false;
      }
    }
  if (ok) rep.pass("n*-compat-pairs");
  ok = true;
  for (std::size_t a = 0; a < t.left.ee().rank() && ok; ++a)
    for (std::size_t b = 0; b < t.right.ee().rank() && ok; ++b) {
      FgabElement aa = t.left.ee().canonical_gen(a);
      FgabElement bb = t.right.ee().canonical_gen(b);
      Nil2Element lhs = t.otbar(aa.scaled(n * n), bb);
      Nil2Element rhs = nt.apply(t.otbar(aa, bb));
      if (!(lhs == rhs)) {
        rep.fail("n*-compat-otimes", std::to_string(a) + "," + std::to_string(b));
        ok = false;
      }
    }
  if (ok) rep.pass("n*-compat-otimes");
  return rep;
}

}  // namespace sqg
