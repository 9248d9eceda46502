#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "sqg/tensor.hpp"

using namespace sqg;

namespace {

FgAbelianGroup cyc(long long n) {
  return n == 0 ? FgAbelianGroup::free(1) : FgAbelianGroup::from_factors({n});
}

Nil2Element random_elt(std::mt19937& rng, const Nil2Datum& d, int len = 5) {
  std::uniform_int_distribution<std::size_t> gd(0, d.nmarks() ? d.nmarks() - 1 : 0);
  std::uniform_int_distribution<int> sd(0, 1);
  Nil2Element acc = d.identity();
  if (d.nmarks() == 0) return acc;
  for (int k = 0; k < len; ++k) {
    Nil2Element g = d.mark(gd(rng));
    acc = d.mul(acc, sd(rng) ? g : d.inv(g));
  }
  return acc;
}

}  // namespace

TEST_CASE("unit laws") {
  SUBCASE("iota on the general znil (.) M") {
    SquareGroup m = znil_set({"s", "t"});
    TensorProduct t = tensor_general(znil(), m);
    SgMorphism iota = unit_left_iso(t);
    SgMorphism inv = unit_left_inv(t);
    CHECK(iota.validate().ok());
    CHECK(inv.validate().ok());
    CHECK(iota.is_iso());
    CHECK(inv.then(iota).equals(SgMorphism::identity(m)));
    CHECK(iota.then(inv).equals(SgMorphism::identity(t.result)));
  }
  SUBCASE("iota over znil (.) znil: iota(2 (.) 3) = 6") {
    TensorProduct t = tensor_general(znil(), znil());
    SgMorphism iota = unit_left_iso(t);
    SquareGroup z = znil();
    Nil2Element two = z.e().scaled(2, z.e().mark(0));
    Nil2Element three = z.e().scaled(3, z.e().mark(0));
    Nil2Element img = iota.fe().apply(t.odot(two, three));
    CHECK(img == z.e().scaled(6, z.e().mark(0)));
  }
  SUBCASE("kappa on M (.) znil") {
    SquareGroup m = a_tensor(cyc(4));
    TensorProduct t = tensor_general(m, znil());
    SgMorphism kappa = unit_right_iso(t);
    SgMorphism inv = unit_right_inv(t);
    CHECK(kappa.validate().ok());
    CHECK(kappa.is_iso());
    CHECK(inv.then(kappa).equals(SgMorphism::identity(m)));
    CHECK(kappa.then(inv).equals(SgMorphism::identity(t.result)));
    Nil2Element x = m.e().mark(0);
    CHECK(kappa.fe().apply(t.odot(x, znil().e().mark(0))) == x);
  }
}

TEST_CASE("tensor relation checks on a small registry") {
  std::vector<std::pair<SquareGroup, SquareGroup>> pairs = {
      {znil_set({"s", "t"}), a_tensor(cyc(2))},
      {a_tensor(cyc(2)), znil_set({"s", "t"})},
      {zq(), from_abelian(cyc(3))},
      {from_abelian(cyc(4)), from_abelian(cyc(6))},
  };
  for (auto& [m, n] : pairs) {
    TensorProduct t = tensor(m, n);
    CHECK(validate_square_group(t.result).ok());
    CHECK(tensor_relations_check(t).ok());
    CHECK(tr_relations_check(t).ok());
    CHECK(sym_relations_check(t).ok());
    CHECK(delta_multiplicativity(t).ok());
    for (long long nn = -4; nn <= 4; ++nn) CHECK(n_star_tensor_compat(t, nn).ok());
  }
}

TEST_CASE("classical restriction") {
  SUBCASE("Z/4 (.) Z/6 = Z/2 as abelian square groups") {
    TensorProduct t = tensor(from_abelian(cyc(4)), from_abelian(cyc(6)));
    CHECK(t.result.e().abelianization().invariant_factors() == Vec{2});
    CHECK(t.result.ee().is_trivial());
  }
  SUBCASE("(Z/2)^t (.) znil = (Z/2)^t") {
    TensorProduct t = tensor_general(a_tensor(cyc(2)), znil());
    SquareGroup expect = a_tensor(cyc(2));
    CHECK(t.result.ee().invariant_factors() == expect.ee().invariant_factors());
    CHECK(t.result.e().abelianization().invariant_factors() ==
          expect.e().abelianization().invariant_factors());
  }
}

TEST_CASE("formal generator identities") {
  SquareGroup m = znil_set({"s", "t"});
  SquareGroup n = zq();
  TensorProduct t = tensor_general(m, n);
  std::mt19937 rng(61);
  SUBCASE("commutator identity") {
    for (int iter = 0; iter < 6; ++iter) {
      Nil2Element x = random_elt(rng, m.e()), xp = random_elt(rng, m.e());
      Nil2Element y = random_elt(rng, n.e()), yp = random_elt(rng, n.e());
      Nil2Element a = t.odot(x, y), b = t.odot(xp, yp);
      Nil2Element comm = t.result.e().sub(t.result.e().mul(a, b), t.result.e().mul(b, a));
      CHECK(comm == t.otbar(m.cross(x, xp), n.cross(y, yp)));
    }
  }
  SUBCASE("(nx) (.) y = x (.) (ny + binom(n,2) PH y)") {
    for (int iter = 0; iter < 5; ++iter) {
      Nil2Element x = random_elt(rng, m.e());
      Nil2Element y = random_elt(rng, n.e());
      for (long long k = -3; k <= 3; ++k) {
        Nil2Element lhs = t.odot(m.e().scaled(k, x), y);
        Nil2Element yprime = n.e().mul(n.e().scaled(k, y),
                                       n.e().scaled(binom2(k), n.apply_p(n.apply_h(y))));
        CHECK(lhs == t.odot(x, yprime));
      }
    }
  }
  SUBCASE("HPH(x) (x-bar) b = H(x) (x-bar) (b - Tb)") {
    for (int iter = 0; iter < 6; ++iter) {
      Nil2Element x = random_elt(rng, m.e());
      FgabElement b = n.ee().canonical_gen(iter % n.ee().rank());
      FgabElement hx = m.apply_h(x);
      FgabElement hph = hx + m.t().apply(hx);
      CHECK(t.otbar(hph, b) == t.otbar(hx, b - n.t().apply(b)));
    }
  }
}

TEST_CASE("left-linear presentation") {
  SquareGroup m = zq();
  SquareGroup n = znil_set({"s", "t"});
  TensorProduct t = tensor_general(m, n);
  std::mt19937 rng(67);
  SUBCASE("x |> P(b) = Delta(x) (x-bar) b") {
    for (std::size_t i = 0; i < m.e().nmarks(); ++i)
      for (std::size_t b = 0; b < n.ee().rank(); ++b) {
        Nil2Element x = m.e().mark(i);
        FgabElement bb = n.ee().canonical_gen(b);
        CHECK(t.tr(x, n.apply_p(bb)) == t.otbar(m.delta().apply(m.cokp_class(x)), bb));
      }
  }
  SUBCASE("H(x) = 0 forces x |> y = x (.) y") {
    Nil2Element zero = m.e().identity();
    Nil2Element y = random_elt(rng, n.e());
    CHECK(t.tr(zero, y) == t.odot(zero, y));
  }
}

TEST_CASE("symmetry") {
  SquareGroup m = znil_set({"s", "t"});
  SquareGroup n = a_tensor(cyc(2));
  TensorProduct mn = tensor(m, n);
  TensorProduct nm = tensor(n, m);
  SgMorphism tau = symmetry_iso(mn, nm);
  SgMorphism tau2 = symmetry_iso(nm, mn);
  CHECK(tau.validate().ok());
  CHECK(tau.is_iso());
  SUBCASE("tau tau = Id") { CHECK(tau.then(tau2).equals(SgMorphism::identity(mn.result))); }
  SUBCASE("tau(a (x-bar) b) = b (x-bar) a") {
    for (std::size_t a = 0; a < m.ee().rank(); ++a)
      for (std::size_t b = 0; b < n.ee().rank(); ++b) {
        FgabElement aa = m.ee().canonical_gen(a), bb = n.ee().canonical_gen(b);
        CHECK(tau.fe().apply(mn.otbar(aa, bb)) == nm.otbar(bb, aa));
      }
  }
  SUBCASE("tau(x (.) y) = y |> x") {
    std::mt19937 rng(71);
    for (int iter = 0; iter < 8; ++iter) {
      Nil2Element x = random_elt(rng, m.e());
      Nil2Element y = random_elt(rng, n.e());
      CHECK(tau.fe().apply(mn.odot(x, y)) == nm.tr(y, x));
    }
  }
}

TEST_CASE("triple tensor and associativity") {
  SquareGroup a = znil_set({"s"});
  SquareGroup b = a_tensor(cyc(2));
  SquareGroup c = from_abelian(cyc(3));
  TensorTriple t = triple_tensor(a, b, c);
  CHECK(t.assoc.validate().ok());
  CHECK(t.assoc_inv.validate().ok());
  SUBCASE("mutually inverse") {
    CHECK(t.assoc.then(t.assoc_inv).equals(SgMorphism::identity(t.ab_c.result)));
    CHECK(t.assoc_inv.then(t.assoc).equals(SgMorphism::identity(t.a_bc.result)));
  }
  SUBCASE("alpha((a (x-bar) b) (.) z) = a (x-bar) b (x-bar) Delta(z)") {
    for (std::size_t i = 0; i < a.ee().rank(); ++i)
      for (std::size_t j = 0; j < b.ee().rank(); ++j)
        for (std::size_t k = 0; k < c.e().nmarks(); ++k) {
          FgabElement aa = a.ee().canonical_gen(i), bb = b.ee().canonical_gen(j);
          Nil2Element z = c.e().mark(k);
          Nil2Element lhs = t.ab_c.odot(t.ab.otbar(aa, bb), z);
          Nil2Element rhs = t.otimes3(aa, bb, c.delta().apply(c.cokp_class(z)));
          CHECK(lhs == rhs);
        }
  }
  SUBCASE("beta(x (.) (b (x-bar) c)) = (x|x)_H (x-bar) b (x-bar) c") {
    for (std::size_t i = 0; i < a.e().nmarks(); ++i)
      for (std::size_t j = 0; j < b.ee().rank(); ++j)
        for (std::size_t k = 0; k < c.ee().rank(); ++k) {
          Nil2Element x = a.e().mark(i);
          FgabElement bb = b.ee().canonical_gen(j), cc = c.ee().canonical_gen(k);
          Nil2Element lhs = t.assoc_inv.fe().apply(t.a_bc.odot(x, t.bc.otbar(bb, cc)));
          Nil2Element rhs = t.otimes3(a.cross(x, x), bb, cc);
          CHECK(lhs == rhs);
        }
  }
}

TEST_CASE("coherence") {
  SquareGroup z = znil();
  SquareGroup b = a_tensor(cyc(2));
  SquareGroup c = from_abelian(cyc(3));
  SUBCASE("triangle") {
    CHECK(verify_triangle(b, c).ok());
    CHECK(verify_triangle(znil_set({"s"}), b).ok());
  }
  SUBCASE("pentagon with units") { CHECK(verify_pentagon(z, z, z, z).ok()); }
  SUBCASE("pentagon mixed") { CHECK(verify_pentagon(znil_set({"s"}), b, znil_set({"t"}), c).ok()); }
  SUBCASE("hexagons") {
    CHECK(verify_hexagons(z, b, c).ok());
    CHECK(verify_hexagons(b, znil_set({"s"}), c).ok());
  }
  SUBCASE("corrupted associator differs") {
    TensorTriple t = triple_tensor(znil_set({"s"}), b, a_tensor(cyc(4)));
    SymbolImages im;
    im.on_pair = [&](const Nil2Element& u, const Nil2Element& zz) {
      return t.assoc.fe().apply(t.ab_c.odot(u, zz));
    };
    im.on_otimes = [&](const FgabElement&, const FgabElement&) {
      return t.a_bc.result.e().identity();  // deliberately wrong
    };
    im.fee = t.assoc.fee();
    SgMorphism bad = induced_from_symbols(t.ab_c, t.a_bc.result, im);
    CHECK(!bad.equals(t.assoc));
  }
}

TEST_CASE("closed form cross-checks") {
  SUBCASE("A^t (.) M = (A tensor M_ee)^t") {
    CHECK(check_tensor_atensor(cyc(2), znil_set({"s", "t"})).ok());
    CHECK(check_tensor_atensor(FgAbelianGroup::free(1), a_tensor(cyc(2))).ok());
  }
  SUBCASE("Z^Q (.) M") {
    CHECK(check_tensor_zq(a_tensor(cyc(2))).ok());
    CHECK(check_tensor_zq(znil_set({"s"})).ok());
  }
  SUBCASE("V(n) (.) M") {
    CHECK(check_tensor_vn(1, a_tensor(cyc(2))).ok());
    CHECK(check_tensor_vn(2, a_tensor(cyc(2))).ok());
  }
  SUBCASE("abelian-square-group pushout form") {
    CHECK(check_tensor_ab_sq(a_tensor(cyc(2)), znil_set({"s"})).ok());
  }
  SUBCASE("quadratic Z-module closed form") {
    CHECK(check_tensor_qz(a_tensor(cyc(2)), a_tensor(cyc(4))).ok());
  }
  SUBCASE("znil_set monoidality") {
    CHECK(check_znil_monoidal({"s"}, {"t"}).ok());
    CHECK(check_znil_monoidal({"s1", "s2"}, {"t1", "t2"}).ok());
  }
}

TEST_CASE("bilinear universal property") {
  SquareGroup m = a_tensor(cyc(2));
  SquareGroup n = znil_set({"s"});
  TensorProduct t = tensor_general(m, n);
  SUBCASE("phi = un factors through the identity") {
    BilinearMap un{m, n, t.result,
                   [&](const Nil2Element& x, const Nil2Element& y) { return t.odot(x, y); },
                   [&](const Nil2Element& x, const Nil2Element& y) { return t.tr(x, y); },
                   [&](const FgabElement& a, const FgabElement& b) { return t.ee_elt(a, b); }};
    CHECK(validate_bilinear(un).ok());
    SgMorphism f = bilinear_factorize(un, t);
    CHECK(f.validate().ok());
    CHECK(f.equals(SgMorphism::identity(t.result)));
  }
  SUBCASE("zero bilinear map factors through zero") {
    SquareGroup zero = zero_sq();
    BilinearMap z{m, n, zero,
                  [&](const Nil2Element&, const Nil2Element&) { return zero.e().identity(); },
                  [&](const Nil2Element&, const Nil2Element&) { return zero.e().identity(); },
                  [&](const FgabElement&, const FgabElement&) { return zero.ee().zero(); }};
    SgMorphism f = bilinear_factorize(z, t);
    CHECK(f.equals(SgMorphism::zero(t.result, zero)));
  }
  SUBCASE("tau-twisted un factors through the symmetry") {
    TensorProduct nm = tensor_general(n, m);
    SgMorphism tau = symmetry_iso(t, nm);
    BilinearMap tw{m, n, nm.result,
                   [&](const Nil2Element& x, const Nil2Element& y) { return nm.tr(y, x); },
                   [&](const Nil2Element& x, const Nil2Element& y) { return nm.odot(y, x); },
                   [&](const FgabElement& a, const FgabElement& b) { return nm.ee_elt(b, a); }};
    CHECK(validate_bilinear(tw).ok());
    SgMorphism f = bilinear_factorize(tw, t);
    CHECK(f.validate().ok());
    CHECK(f.equals(tau));
  }
}

TEST_CASE("exactness") {
  SquareGroup zn = znil();
  SUBCASE("product preservation") {
    CHECK(tensor_preserves_products(zq(), a_tensor(cyc(2)), a_tensor(cyc(3))).ok());
  }
  SUBCASE("right exactness along (2Z)^t -> Z^t -> (Z/2)^t") {
    SquareGroup zt = a_tensor(FgAbelianGroup::free(1));
    SquareGroup z2t = a_tensor(cyc(2));
    SgMorphism two(zt, zt, Nil2Hom(zt.e(), zt.e(), {zt.e().scaled(2, zt.e().mark(0))}),
                   FgabHom::identity(zt.ee()).scaled(2));
    Vec e0{Int(1)};
    SgMorphism pr(zt, z2t, Nil2Hom(zt.e(), z2t.e(), {z2t.e().lattice_elt(e0)}),
                  FgabHom::from_gen_images(zt.ee(), z2t.ee(),
                                           {z2t.ee().canonical_gen(0), z2t.ee().canonical_gen(1)}));
    SgSes ses{two, pr};
    REQUIRE(validate_ses(ses).ok());
    CHECK(tensor_right_exact(ses, zn).ok());
    CHECK(tensor_right_exact(ses, a_tensor(cyc(4))).ok());
  }
  SUBCASE("coproduct sequence") { CHECK(tensor_coproduct_sequence(zn, zn, zn).ok()); }
}
