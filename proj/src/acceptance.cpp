#include "sqg/acceptance.hpp"

#include <future>
#include <numeric>

#include "sqg/boxcomp.hpp"
#include "sqg/cosym.hpp"
#include "sqg/homotopy.hpp"
#include "sqg/qrings.hpp"
#include "sqg/registry.hpp"
#include "sqg/tensor.hpp"

namespace sqg {

namespace {

FgAbelianGroup cyc(long long n) {
  return n == 0 ? FgAbelianGroup::free(1) : FgAbelianGroup::from_factors({n});
}

Report criterion_axioms() {
  Report rep;
  std::vector<std::pair<std::string, SquareGroup>> objs;
  for (const auto& e : registry()) objs.push_back({e.name, e.sq});
  objs.push_back({"znil_xyz", znil_set({"x", "y", "z"})});
  for (const auto& [name, m] : objs) {
    rep.check(validate_square_group(m).ok(), "axioms " + name);
    rep.check(derive(m).invariants.ok(), "derived identities " + name);
    bool nstar_ok = true;
    for (long long n = -3; n <= 3 && nstar_ok; ++n)
      for (long long k = -3; k <= 3 && nstar_ok; ++k)
        if (!n_star_checks(m, n, k).ok()) nstar_ok = false;
    rep.check(nstar_ok, "n-star laws " + name);
  }
  return rep;
}

Report criterion_units() {
  Report rep;
  for (const auto& e : registry()) {
    TensorProduct tl = tensor_general(znil(), e.sq);
    SgMorphism iota = unit_left_iso(tl), iota_inv = unit_left_inv(tl);
    bool ok = iota.validate().ok() && iota_inv.validate().ok() &&
              iota_inv.then(iota).equals(SgMorphism::identity(e.sq)) &&
              iota.then(iota_inv).equals(SgMorphism::identity(tl.result));
    rep.check(ok, "unit-left " + e.name);
    TensorProduct tr2 = tensor_general(e.sq, znil());
    SgMorphism kap = unit_right_iso(tr2), kap_inv = unit_right_inv(tr2);
    ok = kap.validate().ok() && kap_inv.validate().ok() &&
         kap_inv.then(kap).equals(SgMorphism::identity(e.sq)) &&
         kap.then(kap_inv).equals(SgMorphism::identity(tr2.result));
    rep.check(ok, "unit-right " + e.name);
  }
  return rep;
}

Report criterion_coherence() {
  Report rep;
  SquareGroup z = znil();
  SquareGroup s1 = znil_set({"s"});
  SquareGroup t1 = znil_set({"t"});
  SquareGroup b2 = a_tensor(cyc(2));
  SquareGroup b3 = a_tensor(cyc(3));
  SquareGroup a2 = from_abelian(cyc(2));
  SquareGroup a3 = from_abelian(cyc(3));
  SquareGroup a4 = from_abelian(cyc(4));
  std::vector<SquareGroup> pool = {z, s1, b2, b3, a2, a3, a4};
  // 20 pentagon quadruples
  std::size_t count = 0;
  for (std::size_t i = 0; i < pool.size() && count < 20; ++i)
    for (std::size_t j = 0; j < pool.size() && count < 20; ++j) {
      std::size_t k = (i + j) % pool.size();
      std::size_t l = (i + 2 * j + 1) % pool.size();
      rep.merge(verify_pentagon(pool[i], pool[j], pool[k], pool[l]),
                "pentagon-" + std::to_string(count) + "-");
      ++count;
    }
  // 20 triples for both hexagons
  count = 0;
  for (std::size_t i = 0; i < pool.size() && count < 20; ++i)
    for (std::size_t j = 0; j < pool.size() && count < 20; ++j) {
      std::size_t k = (2 * i + j + 1) % pool.size();
      rep.merge(verify_hexagons(pool[i], pool[j], pool[k]),
                "hexagons-" + std::to_string(count) + "-");
      ++count;
    }
  // triangle on all registry pairs
  for (const auto& ea : registry())
    for (const auto& eb : registry())
      rep.merge(verify_triangle(ea.sq, eb.sq), "triangle-" + ea.name + "-" + eb.name + "-");
  // tau is an involution on a sample
  TensorProduct mn = tensor(b2, s1);
  TensorProduct nm = tensor(s1, b2);
  rep.check(symmetry_iso(mn, nm).then(symmetry_iso(nm, mn)).equals(
                SgMorphism::identity(mn.result)),
            "tau-involution");
  return rep;
}

Report criterion_classical() {
  Report rep;
  std::vector<long long> ns = {0, 2, 3, 4, 6};
  auto val = [&](long long n) { return n == 0 ? std::string("Z") : "Z/" + std::to_string(n); };
  for (long long a : ns)
    for (long long b : ns) {
      TensorProduct t = tensor(from_abelian(cyc(a)), from_abelian(cyc(b)));
      FgAbelianGroup classical = fgab_tensor(cyc(a), cyc(b)).group;
      bool ok = t.result.ee().is_trivial() &&
                t.result.e().abelianization().invariant_factors() ==
                    classical.invariant_factors();
      rep.check(ok, "classical " + val(a) + " (.) " + val(b));
    }
  // Tor1 of (Z/m)^t against registry objects
  for (long long mm : {2, 3, 4})
    for (const auto& e : registry()) {
      SquareGroup t = tor1_atensor(cyc(mm), e.sq);
      // expected: (M_ee[m])^t
      FgabHom mult = FgabHom::identity(e.sq.ee()).scaled(mm);
      FgAbelianGroup torsion = mult.kernel().first;
      SquareGroup expect = a_tensor(torsion);
      rep.check(t.ee().invariant_factors() == expect.ee().invariant_factors(),
                "Tor1((Z/" + std::to_string(mm) + ")^t, " + e.name + ")");
    }
  return rep;
}

Report criterion_closed_forms() {
  Report rep;
  rep.merge(check_tensor_atensor(cyc(2), znil_set({"s", "t"})), "atensor-z2-znil2-");
  rep.merge(check_tensor_atensor(FgAbelianGroup::free(1), zq()), "atensor-z-zq-");
  rep.merge(check_tensor_zq(a_tensor(cyc(2))), "zq-z2t-");
  rep.merge(check_tensor_zq(znil_set({"s"})), "zq-znil-");
  rep.merge(check_tensor_vn(1, a_tensor(cyc(2))), "v1-z2t-");
  rep.merge(check_tensor_vn(2, a_tensor(cyc(2))), "v2-z2t-");
  rep.merge(check_tensor_vn(1, znil_set({"s"})), "v1-znil-");
  rep.merge(check_tensor_ab_sq(a_tensor(cyc(2)), znil_set({"s"})), "absq-");
  rep.merge(check_tensor_ab_sq(a_tensor(cyc(4)), zq()), "absq2-");
  rep.merge(check_tensor_qz(a_tensor(cyc(2)), a_tensor(cyc(4))), "qz-");
  rep.merge(check_znil_monoidal({"s1"}, {"t1", "t2"}), "znil-monoidal-1x2-");
  rep.merge(check_znil_monoidal({"s1", "s2"}, {"t1", "t2", "t3"}), "znil-monoidal-2x3-");
  return rep;
}

Report criterion_exactness() {
  Report rep;
  // finite-product preservation on five instances
  rep.merge(tensor_preserves_products(znil(), a_tensor(cyc(2)), a_tensor(cyc(3))), "prod-1-");
  rep.merge(tensor_preserves_products(zq(), a_tensor(cyc(2)), a_tensor(cyc(3))), "prod-2-");
  rep.merge(tensor_preserves_products(a_tensor(cyc(2)), from_abelian(cyc(3)), znil()), "prod-3-");
  rep.merge(tensor_preserves_products(znil_set({"s"}), a_tensor(cyc(2)), from_abelian(cyc(2))),
            "prod-4-");
  rep.merge(tensor_preserves_products(from_abelian(cyc(4)), a_tensor(cyc(2)), a_tensor(cyc(4))),
            "prod-5-");
  // right exactness along (kZ)^t -> Z^t -> (Z/k)^t for several k and M
  SquareGroup zt = a_tensor(FgAbelianGroup::free(1));
  for (long long k : {2, 3}) {
    FgAbelianGroup zk = cyc(k);
    SquareGroup zkt = a_tensor(zk);
    SgMorphism mul(zt, zt, Nil2Hom(zt.e(), zt.e(), {zt.e().scaled(k, zt.e().mark(0))}),
                   FgabHom::identity(zt.ee()).scaled(k));
    Vec e0{Int(1)};
    SgMorphism pr(zt, zkt, Nil2Hom(zt.e(), zkt.e(), {zkt.e().lattice_elt(e0)}),
                  FgabHom::from_gen_images(zt.ee(), zkt.ee(),
                                           {zkt.ee().canonical_gen(0), zkt.ee().canonical_gen(1)}));
    SgSes ses{mul, pr};
    rep.merge(validate_ses(ses), "ses-" + std::to_string(k) + "-");
    rep.merge(tensor_right_exact(ses, znil()), "rexact-znil-" + std::to_string(k) + "-");
    rep.merge(tensor_right_exact(ses, a_tensor(cyc(4))), "rexact-z4t-" + std::to_string(k) + "-");
    rep.merge(tensor_right_exact(ses, znil_set({"s"})), "rexact-znils-" + std::to_string(k) + "-");
  }
  // A (.) mu mono for projective A
  {
    FgAbelianGroup zk = cyc(2);
    SquareGroup zkt = a_tensor(zk);
    SgMorphism mul(zt, zt, Nil2Hom(zt.e(), zt.e(), {zt.e().scaled(2, zt.e().mark(0))}),
                   FgabHom::identity(zt.ee()).scaled(2));
    Vec e0{Int(1)};
    SgMorphism pr(zt, zkt, Nil2Hom(zt.e(), zkt.e(), {zkt.e().lattice_elt(e0)}),
                  FgabHom::from_gen_images(zt.ee(), zkt.ee(),
                                           {zkt.ee().canonical_gen(0), zkt.ee().canonical_gen(1)}));
    SgSes ses{mul, pr};
    rep.merge(tensor_mono_projective(ses, v_free(1)), "mono-v1-");
    rep.merge(tensor_mono_projective(ses, a_tensor(FgAbelianGroup::free(1))), "mono-zt-");
    rep.merge(tensor_mono_projective(ses, free_sq(1, 1)), "mono-free11-");
  }
  // coproduct sequence on three instances
  rep.merge(tensor_coproduct_sequence(znil(), znil(), znil()), "copr-1-");
  rep.merge(tensor_coproduct_sequence(a_tensor(cyc(2)), znil(), znil()), "copr-2-");
  rep.merge(tensor_coproduct_sequence(znil(), znil(), a_tensor(cyc(2))), "copr-3-");
  // six-term family
  rep.merge(les_check_family(a_tensor(cyc(4)), 2), "les-z4t-");
  rep.merge(les_check_family(znil(), 2), "les-znil-");
  rep.merge(les_check_family(zq(), 2), "les-zq-");
  return rep;
}

Report criterion_box() {
  Report rep;
  for (const auto& e : registry()) {
    rep.merge(box_unit_left(e.sq), "unit-left-" + e.name + "-");
    rep.merge(box_unit_right(e.sq), "unit-right-" + e.name + "-");
  }
  rep.merge(psg_box_compat(znil_set({"s"}), a_tensor(cyc(2))), "psg-compat-1-");
  rep.merge(psg_box_compat(zq(), znil()), "psg-compat-2-");
  rep.merge(psg_box_compat(a_tensor(cyc(2)), zq()), "psg-compat-3-");
  // sigma is an isomorphism exactly on the Sigma sublist
  for (const auto& e : registry()) {
    bool iso = sigma_is_iso(e.sq, e.sq);
    if (e.in_sigma)
      rep.check(iso, "sigma-iso-" + e.name);
    else
      rep.pass(std::string("sigma-on-") + e.name + (iso ? " (iso)" : " (not iso)"));
  }
  // pair inside Sigma and a certified non-isomorphism witness outside
  rep.check(sigma_is_iso(znil_set({"s"}), znil_set({"t"})), "sigma-iso-sigma-pair");
  rep.check(!sigma_is_iso(zq(), zq()), "sigma-noniso-witness-zq");
  rep.merge(sigma_checks(znil_set({"s"}), a_tensor(cyc(2))), "sigma-formulas-");
  rep.merge(sigma_lax_square(znil(), znil_set({"s"}), a_tensor(cyc(2))), "sigma-lax-");
  return rep;
}

Report criterion_homotopy() {
  Report rep;
  {
    auto pis = spectrum_homotopy_range(znil(), 3);
    rep.check(pis[0].invariant_factors() == Vec{0}, "pi0(znil)=Z");
    rep.check(pis[1].invariant_factors() == Vec{2}, "pi1(znil)=Z/2");
    rep.check(pis[2].is_trivial(), "pi2(znil)=0");
    rep.check(pis[3].invariant_factors() == Vec{2}, "pi3(znil)=Z/2");
  }
  {
    SquareGroup zt = a_tensor(FgAbelianGroup::free(1));
    auto pis = spectrum_homotopy_range(zt, 3);
    bool all0 = true;
    for (const auto& p : pis) all0 = all0 && p.is_trivial();
    rep.check(all0, "pi(Z^t)=0 in degrees 0..3");
  }
  rep.check(!k_postnikov(znil()).k.is_zero(), "k(znil) nonzero");
  for (const auto& e : registry())
    rep.merge(two_periodicity(e.sq, 6), "periodicity-" + e.name + "-");
  return rep;
}

Report criterion_rings() {
  Report rep;
  QuadraticRing zn = qring_znil();
  rep.merge(validate_qring(zn), "qring-znil-");
  rep.merge(validate_sqring(qr_to_sr(zn)), "sqring-znil-");
  QuadraticRing m2 = monoid_ring(Monoid::cyclic2());
  rep.merge(validate_qring(m2), "qring-mon2-");
  rep.merge(validate_sqring(qr_to_sr(m2)), "sqring-mon2-");
  QuadraticRing lz = monoid_ring(Monoid::left_zero3());
  rep.merge(validate_qring(lz), "qring-lz3-");
  rep.check(is_commutative_qring(zn), "znil-commutative");
  rep.check(is_commutative_qring(m2), "mon2-commutative");
  rep.check(!is_commutative_qring(lz), "lz3-noncommutative");
  rep.merge(psi_checks(zn), "psi-znil-");
  rep.merge(psi_checks(m2), "psi-mon2-");
  // psi(2) = 1 in Z/2 for znil
  {
    PsiData p = psi_data(zn);
    rep.check(p.codomain.invariant_factors() == Vec{2}, "psi-codomain-Z/2");
    Nil2Element two = zn.r.e().scaled(2, zn.r.e().mark(0));
    rep.check(p.psi(two) == p.codomain.canonical_gen(0), "psi(2)=1");
    rep.check(p.psi(zn.r.e().mark(0)).is_zero(), "psi(1)=0");
  }
  return rep;
}

Report criterion_cosym() {
  Report rep;
  std::vector<std::pair<std::string, CosymmetryObject>> objs = {
      {"unit", cos_unit()},
      {"free1", cos_free(1)},
      {"free2", cos_free(2)},
      {"free3", cos_free(3)},
  };
  for (auto& [name, x] : objs) {
    rep.merge(cos_validate(x), name + "-valid-");
    rep.merge(cosym_roundtrip(x), name + "-PsiJ-");
  }
  for (const auto& name : sigma_names())
    rep.merge(sg_roundtrip(registry_get(name)), name + "-JPsi-");
  rep.merge(j_monoidal_check(cos_free(1), cos_free(1)), "J-monoidal-1-");
  rep.merge(j_monoidal_check(cos_free(1), cos_free(2)), "J-monoidal-2-");
  rep.merge(j_monoidal_check(cos_free(2), cos_free(1)), "J-monoidal-3-");
  rep.merge(cos_z2_obstruction(), "");
  return rep;
}

}  // namespace

Report acceptance_criterion(int k) {
  switch (k) {
    case 1: return criterion_axioms();
    case 2: return criterion_units();
    case 3: return criterion_coherence();
    case 4: return criterion_classical();
    case 5: return criterion_closed_forms();
    case 6: return criterion_exactness();
    case 7: return criterion_box();
    case 8: return criterion_homotopy();
    case 9: return criterion_rings();
    case 10: return criterion_cosym();
    default: throw SqgError("unknown acceptance criterion");
  }
}

Report run_acceptance(std::size_t threads) {
  static const char* names[] = {
      "1 axioms and derived identities",
      "2 unit laws",
      "3 coherence",
      "4 classical restriction",
      "5 closed-form cross-checks",
      "6 exactness",
      "7 box product and sigma",
      "8 spectrum homotopy",
      "9 quadratic and square rings",
      "10 cosymmetry",
  };
  std::vector<Report> parts(kAcceptanceCriteria);
  if (threads <= 1) {
    for (int k = 1; k <= kAcceptanceCriteria; ++k) parts[k - 1] = acceptance_criterion(k);
  } else {
    std::vector<std::future<Report>> futs;
    for (int k = 1; k <= kAcceptanceCriteria; ++k)
      futs.push_back(std::async(std::launch::async, [k] { return acceptance_criterion(k); }));
    for (int k = 0; k < kAcceptanceCriteria; ++k) parts[k] = futs[k].get();
  }
  Report rep;
  for (int k = 0; k < kAcceptanceCriteria; ++k) {
    rep.check(parts[k].ok(), std::string("criterion ") + names[k],
              parts[k].ok() ? "" : parts[k].first_failure()->name);
    rep.merge(parts[k], std::string("  [") + std::to_string(k + 1) + "] ");
  }
  return rep;
}

}  // namespace sqg
