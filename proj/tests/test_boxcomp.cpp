#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sqg/boxcomp.hpp"

using namespace sqg;

namespace {
FgAbelianGroup cyc(long long n) {
  return n == 0 ? FgAbelianGroup::free(1) : FgAbelianGroup::from_factors({n});
}
}  // namespace

TEST_CASE("forgetful functor to pre-square groups") {
  SUBCASE("p(znil): T=-Id, bracket(x,y) = xy") {
    PreSquareGroup p = psg_forget(znil());
    CHECK(p.validate().ok());
    CHECK(p.t.matrix() == IntMatrix(1, 1, {{-1}}));
    Vec e0{Int(1)};
    CHECK(p.bracket_form(e0, e0) == p.ee.canonical_gen(0));
  }
  SUBCASE("p(A^t): T = swap") {
    SquareGroup a = a_tensor(cyc(2));
    PreSquareGroup p = psg_forget(a);
    CHECK(p.validate().ok());
    CHECK(p.t.apply(p.ee.canonical_gen(0)) == p.ee.canonical_gen(1));
  }
  SUBCASE("roundtrip with the original H") {
    for (const SquareGroup& m : {znil(), zq(), znil_set({"s", "t"}), a_tensor(cyc(4))})
      CHECK(psg_roundtrip_check(m).ok());
  }
  SUBCASE("n* on p(Z^Q): 2*(x) = 2x + PH(x)") {
    SquareGroup q = zq();
    Nil2Hom f = n_star_psg(q, 2);
    Nil2Element x = q.e().mark(0);
    CHECK(f.apply(x) == q.e().mul(q.e().scaled(2, x), q.apply_p(q.apply_h(x))));
    CHECK(n_star_psg_checks(q, 2).ok());
    CHECK(n_star_psg(q, 1).equals(Nil2Hom::identity(q.e())));
    CHECK(n_star_psg(q, 0).apply(x).is_identity());
  }
}

TEST_CASE("group tensor") {
  SUBCASE("Z (x) M = M_e") {
    SquareGroup m = a_tensor(cyc(2));
    GroupTensor t = group_tensor(Nil2Datum::from_abelian(FgAbelianGroup::free(1)), m);
    CHECK(t.group.abelianization().invariant_factors() ==
          m.e().abelianization().invariant_factors());
    CHECK(t.group.validate().ok());
  }
  SUBCASE("free G (x) znil = G^nil") {
    GroupTensor t = group_tensor(Nil2Datum::free_nil2(2), znil());
    Nil2Datum expect = Nil2Datum::free_nil2(2);
    CHECK(t.group.abelianization().invariant_factors() ==
          expect.abelianization().invariant_factors());
    // the slot map is an isomorphism onto the free nil2 group
    Nil2Hom h(expect, t.group, {t.slot[0][0], t.slot[1][0],
                                t.group.sub(t.group.mul(t.slot[0][0], t.slot[1][0]),
                                            t.group.mul(t.slot[1][0], t.slot[0][0]))});
    CHECK(h.validate().ok());
    CHECK(hom_is_injective(h));
    CHECK(hom_is_surjective(h));
  }
  SUBCASE("G (x) A^t = A ten G^ab ten G^ab") {
    Nil2Datum g = Nil2Datum::free_nil2(2);
    SquareGroup at = a_tensor(cyc(2));
    GroupTensor t = group_tensor(g, at);
    // order |A|^(n^2) with n = 2
    CHECK(t.group.is_finite());
    CHECK(t.group.order() == 16);
    CHECK(t.group.validate().ok());
  }
  SUBCASE("cross-effect sequence on small coproducts") {
    Nil2Datum z1 = Nil2Datum::from_abelian(FgAbelianGroup::free(1));
    Nil2Datum z2 = Nil2Datum::from_abelian(cyc(2));
    CHECK(group_tensor_cross_effect(z2, z2, a_tensor(cyc(2))).ok());
    CHECK(group_tensor_cross_effect(z1, z2, a_tensor(cyc(2))).ok());
  }
}

TEST_CASE("box product") {
  SUBCASE("units on a sample") {
    for (const SquareGroup& m : {znil(), a_tensor(cyc(2)), zq(), znil_set({"s", "t"})}) {
      CHECK(box_unit_left(m).ok());
      CHECK(box_unit_right(m).ok());
    }
  }
  SUBCASE("relations on generators") {
    BoxProduct b = box(znil_set({"s"}), a_tensor(cyc(2)));
    CHECK(validate_square_group(b.result).ok());
    CHECK(box_relations_check(b).ok());
  }
  SUBCASE("forgetful compatibility p(M [] N) = p(M) [] N") {
    CHECK(psg_box_compat(zq(), znil()).ok());
    CHECK(psg_box_compat(znil_set({"s"}), a_tensor(cyc(2))).ok());
  }
}

TEST_CASE("sigma") {
  SUBCASE("formulas and validity") {
    CHECK(sigma_checks(znil_set({"s"}), a_tensor(cyc(2))).ok());
    CHECK(sigma_checks(zq(), znil()).ok());
  }
  SUBCASE("sigma on znil [] znil is an isomorphism") {
    CHECK(sigma_is_iso(znil(), znil()));
  }
  SUBCASE("sigma iso on Sigma objects, not on Z^Q") {
    CHECK(sigma_is_iso(znil_set({"s"}), znil_set({"t"})));
    CHECK(!sigma_is_iso(zq(), zq()));
  }
  SUBCASE("lax square") {
    CHECK(sigma_lax_square(znil(), znil_set({"s"}), a_tensor(cyc(2))).ok());
  }
}

TEST_CASE("gamma models") {
  SUBCASE("checks over p(M) for registry M") {
    CHECK(gamma_model_checks(psg_forget(a_tensor(cyc(2)))).ok());
    CHECK(gamma_model_checks(psg_forget(znil())).ok());
    CHECK(gamma_model_checks(psg_forget(zq())).ok());
  }
  SUBCASE("S (.) p(M) = <S> (x) M") {
    CHECK(gamma_vs_group_tensor(1, a_tensor(cyc(2))).ok());
    CHECK(gamma_vs_group_tensor(2, a_tensor(cyc(2))).ok());
    CHECK(gamma_vs_group_tensor(3, a_tensor(cyc(2))).ok());
    CHECK(gamma_vs_group_tensor(2, znil()).ok());
  }
  SUBCASE("psg with trivial ee behaves as a plain abelian group") {
    PreSquareGroup p = psg_forget(from_abelian(cyc(6)));
    CHECK(p.validate().ok());
    GammaModel g2 = gamma_model(2, p);
    CHECK(g2.group.order() == 36);  // just A x A
  }
}

TEST_CASE("sigma naturality") {
  SquareGroup z2t = a_tensor(FgAbelianGroup::from_factors({2}));
  auto homs = enumerate_sg_homs(z2t, z2t);
  REQUIRE(homs.size() == 4);
  CHECK(sigma_naturality(homs[1], homs[homs.size() - 1]).ok());
  CHECK(sigma_naturality(SgMorphism::identity(znil_set({"s"})),
                         SgMorphism::identity(z2t))
            .ok());
}
