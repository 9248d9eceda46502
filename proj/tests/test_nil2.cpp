#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "sqg/nil2.hpp"

using namespace sqg;

namespace {

// Collection oracle: rewrite a signed word one adjacent swap at a time,
// tracking commutators [i,j] (i<j) separately. Independent of Nil2Datum.
struct OracleForm {
  std::map<std::size_t, Int> linear;
  std::map<std::pair<std::size_t, std::size_t>, Int> comm;
};

OracleForm collect_oracle(const std::vector<std::pair<std::size_t, int>>& word) {
  // letters as (gen, exp=+-1); bubble into ascending order, swap of (j ... i)
  // with j > i inserts [i,j]^{-ei*ej} since a+b = b+a+[a,b].
  std::vector<std::pair<std::size_t, Int>> w;
  for (auto [g, s] : word) w.push_back({g, Int(s)});
  OracleForm out;
  for (;;) {
    bool swapped = false;
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
      if (w[k].first > w[k + 1].first) {
        // [a,b] with a = w[k], b = w[k+1]; a+b = b+a+[a,b]; [a,b] central
        std::size_t i = w[k + 1].first, j = w[k].first;
        out.comm[{i, j}] += -w[k].second * w[k + 1].second;  // [j^e, i^f] = -ef [i,j]
        std::swap(w[k], w[k + 1]);
        swapped = true;
      }
    }
    if (!swapped) break;
  }
  for (auto& [g, e] : w) out.linear[g] += e;
  for (auto it = out.linear.begin(); it != out.linear.end();)
    it = it->second == 0 ? out.linear.erase(it) : std::next(it);
  for (auto it = out.comm.begin(); it != out.comm.end();)
    it = it->second == 0 ? out.comm.erase(it) : std::next(it);
  return out;
}

bool matches_oracle(const FreeNil2Group& f, const Nil2Element& x, const OracleForm& o) {
  Nil2NormalForm nf = f.normal_form(x);
  for (std::size_t i = 0; i < nf.linear.size(); ++i) {
    Int expect = o.linear.count(i) ? o.linear.at(i) : Int(0);
    if (nf.linear[i] != expect) return false;
  }
  std::map<std::pair<std::size_t, std::size_t>, Int> c = nf.commutator;
  return c == o.comm;
}

}  // namespace

TEST_CASE("free nil2 normal forms") {
  FreeNil2Group f({"x", "y"});
  SUBCASE("x+x = 2x") {
    Nil2Element e = f.parse_word("x x");
    CHECK(f.normal_form(e).str(f.names()) == "2*x");
  }
  SUBCASE("y+x = x+y-[x,y]") {
    Nil2Element e = f.parse_word("y x");
    Nil2NormalForm nf = f.normal_form(e);
    CHECK(nf.linear == Vec{1, 1});
    CHECK(nf.commutator.at({0, 1}) == -1);
  }
  SUBCASE("x+y+x+y = 2x+2y-[x,y]") {
    Nil2Element e = f.parse_word("x y x y");
    Nil2NormalForm nf = f.normal_form(e);
    CHECK(nf.linear == Vec{2, 2});
    CHECK(nf.commutator.at({0, 1}) == -1);
  }
  SUBCASE("unknown generator") { CHECK_THROWS_AS(f.parse_word("z"), SqgError); }
}

TEST_CASE("collection oracle agreement on random words") {
  std::mt19937 rng(5);
  for (std::size_t rank = 1; rank <= 4; ++rank) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < rank; ++i) names.push_back("g" + std::to_string(i));
    FreeNil2Group f(names);
    std::uniform_int_distribution<std::size_t> gd(0, rank - 1);
    std::uniform_int_distribution<int> sd(0, 1);
    for (int iter = 0; iter < 60; ++iter) {
      std::vector<std::pair<std::size_t, int>> word;
      std::uniform_int_distribution<int> ld(0, 12);
      int len = ld(rng);
      for (int k = 0; k < len; ++k) word.push_back({gd(rng), sd(rng) ? 1 : -1});
      CHECK(matches_oracle(f, f.reduce_word(word), collect_oracle(word)));
    }
  }
}

TEST_CASE("reduction is a homomorphism") {
  std::mt19937 rng(9);
  FreeNil2Group f({"a", "b", "c"});
  std::uniform_int_distribution<std::size_t> gd(0, 2);
  std::uniform_int_distribution<int> sd(0, 1);
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<std::pair<std::size_t, int>> w1, w2;
    for (int k = 0; k < 6; ++k) {
      w1.push_back({gd(rng), sd(rng) ? 1 : -1});
      w2.push_back({gd(rng), sd(rng) ? 1 : -1});
    }
    std::vector<std::pair<std::size_t, int>> w12 = w1;
    w12.insert(w12.end(), w2.begin(), w2.end());
    CHECK(f.reduce_word(w12) ==
          f.datum().mul(f.reduce_word(w1), f.reduce_word(w2)));
  }
}

TEST_CASE("identity na+nb = n(a+b) + C(n,2)[a,b]") {
  std::mt19937 rng(15);
  FreeNil2Group f({"a", "b", "c"});
  const Nil2Datum& d = f.datum();
  std::uniform_int_distribution<std::size_t> gd(0, 2);
  std::uniform_int_distribution<int> sd(0, 1);
  for (int iter = 0; iter < 40; ++iter) {
    std::vector<std::pair<std::size_t, int>> w1, w2;
    for (int k = 0; k < 4; ++k) {
      w1.push_back({gd(rng), sd(rng) ? 1 : -1});
      w2.push_back({gd(rng), sd(rng) ? 1 : -1});
    }
    Nil2Element a = f.reduce_word(w1), b = f.reduce_word(w2);
    for (long long n = -5; n <= 5; ++n) {
      Nil2Element lhs = d.mul(d.scaled(n, a), d.scaled(n, b));
      Nil2Element comm = d.sub(d.mul(a, b), d.mul(b, a));  // [a,b] up to centrality
      Nil2Element rhs = d.mul(d.scaled(n, d.mul(a, b)), d.scaled(binom2(n), comm));
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("validate_nil2") {
  SUBCASE("free datum passes") {
    CHECK(Nil2Datum::free_nil2(3).validate().ok());
  }
  SUBCASE("spec-style free datum with beta(e_i,e_j) = e_i^e_j for i<j passes") {
    FgAbelianGroup c = FgAbelianGroup::free(1);
    SparseForm beta;
    beta[{0, 1}] = c.canonical_gen(0);
    Nil2Datum d(2, IntMatrix(0, 2), c, {}, beta);
    CHECK(d.validate().ok());
  }
  SUBCASE("abelian datum passes") {
    CHECK(Nil2Datum::from_abelian(FgAbelianGroup::from_factors({4, 6})).validate().ok());
  }
  SUBCASE("non-central relation fails CN1") {
    // relation (2,0) but [g_0, g_1] nonzero of order coprime to nothing:
    // lambda(r, e_1) = 2*[g0,g1] != 0 in C = Z
    FgAbelianGroup c = FgAbelianGroup::free(1);
    SparseForm beta;
    beta[{1, 0}] = -c.canonical_gen(0);
    IntMatrix rel(1, 2, {{2, 0}});
    std::vector<FgabElement> rho{c.zero()};
    Nil2Datum d(2, rel, c, rho, beta);
    Report r = d.validate();
    CHECK(!r.ok());
    CHECK(r.first_failure()->name == "CN1");
  }
}

TEST_CASE("group laws and commutators") {
  FreeNil2Group f({"a", "b"});
  const Nil2Datum& d = f.datum();
  Nil2Element a = f.parse_word("a"), b = f.parse_word("b");
  SUBCASE("[a,a] = 0") { CHECK(d.commutator(a, a).is_identity()); }
  SUBCASE("[g1,g2] is the central basis element") {
    Nil2Element c = d.commutator(a, b);
    CHECK(is_zero_vec(c.v));
    CHECK(c.c == d.central().canonical_gen(0));
    // agreement with -a-b+a+b
    Nil2Element honest = d.mul(d.mul(d.mul(d.inv(a), d.inv(b)), a), b);
    CHECK(honest == c);
  }
  SUBCASE("triple commutator vanishes") {
    Nil2Element c = d.commutator(a, b);
    CHECK(d.commutator(c, a).is_identity());
    CHECK(d.commutator(c, b).is_identity());
  }
  SUBCASE("inverse and scaling") {
    std::mt19937 rng(21);
    std::uniform_int_distribution<std::size_t> gd(0, 1);
    std::uniform_int_distribution<int> sd(0, 1);
    for (int iter = 0; iter < 30; ++iter) {
      std::vector<std::pair<std::size_t, int>> w;
      for (int k = 0; k < 7; ++k) w.push_back({gd(rng), sd(rng) ? 1 : -1});
      Nil2Element x = f.reduce_word(w);
      CHECK(d.mul(x, d.inv(x)).is_identity());
      Nil2Element acc = d.identity();
      for (int n = 0; n < 5; ++n) {
        CHECK(acc == d.scaled(n, x));
        acc = d.mul(acc, x);
      }
      CHECK(d.scaled(-3, x) == d.inv(d.scaled(3, x)));
    }
  }
}

TEST_CASE("quadratic map extension") {
  // H with H(s)=0 and cross effect Phi(u,v) = v tensor u on the free group
  FreeNil2Group f({"s", "t"});
  const Nil2Datum& d = f.datum();
  TensorAb sq = fgab_tensor(d.abelianization(), d.abelianization());
  // marks: s, t, [s,t]; classes of marks: e0, e1, 0
  SparseForm phi;
  auto cls = [&](std::size_t i) { return d.ab_class(d.mark(i)); };
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) phi[{i, j}] = sq.pair(cls(j), cls(i));
  std::vector<FgabElement> values(d.nmarks(), sq.group.zero());
  // value on the commutator mark [s,t]: Phi(s,t) - Phi(t,s)
  values[2] = phi[{0, 1}] - phi[{1, 0}];
  QuadraticMap H(d, sq.group, values, phi);
  CHECK(H.validate().ok());

  Nil2Element s = f.parse_word("s"), t = f.parse_word("t");
  SUBCASE("H(s) = 0") { CHECK(H.eval(s).is_zero()); }
  SUBCASE("H([u,v]) = v x u - u x v") {
    std::mt19937 rng(31);
    std::uniform_int_distribution<std::size_t> gd(0, 1);
    std::uniform_int_distribution<int> sd(0, 1);
    for (int iter = 0; iter < 25; ++iter) {
      std::vector<std::pair<std::size_t, int>> w1, w2;
      for (int k = 0; k < 5; ++k) {
        w1.push_back({gd(rng), sd(rng) ? 1 : -1});
        w2.push_back({gd(rng), sd(rng) ? 1 : -1});
      }
      Nil2Element u = f.reduce_word(w1), v = f.reduce_word(w2);
      FgabElement lhs = H.eval(d.commutator(u, v));
      FgabElement rhs = sq.pair(d.ab_class(v), d.ab_class(u)) -
                        sq.pair(d.ab_class(u), d.ab_class(v));
      CHECK(lhs == rhs);
    }
  }
  SUBCASE("H(2s) = s x s") { CHECK(H.eval(d.scaled(2, s)) == sq.pair(cls(0), cls(0))); }
  SUBCASE("quadratic law f(u+v) = f(u)+f(v)+Phi(u,v)") {
    std::mt19937 rng(37);
    std::uniform_int_distribution<std::size_t> gd(0, 1);
    std::uniform_int_distribution<int> sd(0, 1);
    for (int iter = 0; iter < 40; ++iter) {
      std::vector<std::pair<std::size_t, int>> w1, w2;
      for (int k = 0; k < 6; ++k) {
        w1.push_back({gd(rng), sd(rng) ? 1 : -1});
        w2.push_back({gd(rng), sd(rng) ? 1 : -1});
      }
      Nil2Element u = f.reduce_word(w1), v = f.reduce_word(w2);
      CHECK(H.eval(d.mul(u, v)) == H.eval(u) + H.eval(v) + H.cross(u, v));
    }
  }
  SUBCASE("f(na) = n f(a) + C(n,2) Phi(a,a)") {
    Nil2Element x = f.parse_word("s t s");
    for (long long n = -5; n <= 5; ++n) {
      CHECK(H.eval(d.scaled(n, x)) ==
            H.eval(x).scaled(n) + H.cross(x, x).scaled(binom2(n)));
    }
  }
}

TEST_CASE("quadratic maps descend only when relators vanish") {
  // zero map descends through anything
  auto z6 = FgAbelianGroup::from_factors({6});
  Nil2Datum d = Nil2Datum::from_abelian(z6);
  CHECK(QuadraticMap::zero(d, FgAbelianGroup::free(1)).validate().ok());
  // on Z/2: f(g)=1 in Z/2 with phi=0 satisfies torsion (2*1=0); but into Z/3 fails
  auto z2 = FgAbelianGroup::from_factors({2});
  Nil2Datum dz2 = Nil2Datum::from_abelian(z2);
  auto z2t = FgAbelianGroup::from_factors({2});
  QuadraticMap good(dz2, z2t, {z2t.canonical_gen(0)}, {});
  CHECK(good.validate().ok());
  auto z3t = FgAbelianGroup::from_factors({3});
  QuadraticMap bad(dz2, z3t, {z3t.canonical_gen(0)}, {});
  Report r = bad.validate();
  CHECK(!r.ok());
  CHECK(r.first_failure()->name == "relator-lattice");
}

TEST_CASE("nil2 homs") {
  FreeNil2Group f({"a", "b"});
  const Nil2Datum& d = f.datum();
  SUBCASE("identity validates") { CHECK(Nil2Hom::identity(d).validate().ok()); }
  SUBCASE("abelianization hom kills the commutator") {
    Nil2Datum ab = Nil2Datum::from_abelian(FgAbelianGroup::free(2));
    Vec e0(2, Int(0)), e1(2, Int(0));
    e0[0] = 1;
    e1[1] = 1;
    std::vector<Nil2Element> imgs{ab.lattice_elt(e0), ab.lattice_elt(e1), ab.identity()};
    Nil2Hom h(d, ab, imgs);
    CHECK(h.validate().ok());
    CHECK(h.apply(d.commutator(d.mark(0), d.mark(1))).is_identity());
    // kernel = commutator subgroup
    auto kg = hom_kernel_gens(h);
    Nil2Subgroup ker{d, kg};
    CHECK(ker.contains(d.commutator(d.mark(0), d.mark(1))));
    CHECK(!ker.contains(d.mark(0)));
  }
  SUBCASE("assignment violating a torsion relation is an error") {
    Nil2Datum z2 = Nil2Datum::from_abelian(FgAbelianGroup::from_factors({2}));
    Nil2Datum z = Nil2Datum::from_abelian(FgAbelianGroup::free(1));
    Vec e0{Int(1)};
    Nil2Hom h(z2, z, {z.lattice_elt(e0)});
    CHECK(!h.validate().ok());
  }
}

TEST_CASE("subgroups and quotients") {
  FreeNil2Group f({"a", "b"});
  const Nil2Datum& d = f.datum();
  SUBCASE("center membership") {
    Nil2Element comm = d.commutator(d.mark(0), d.mark(1));
    CHECK(d.is_central(comm));
    CHECK(!d.is_central(d.mark(0)));
  }
  SUBCASE("quotient by a lattice element") {
    // kill a: quotient is free nil2 on b = Z
    auto q = quotient_datum(d, {d.mark(0)});
    CHECK(q.group.validate().ok());
    CHECK(q.proj.validate().ok());
    CHECK(q.proj.apply(d.mark(0)).is_identity());
    CHECK(!q.proj.apply(d.mark(1)).is_identity());
    // commutator dies since [a,b] is a commutator with a killed generator
    CHECK(q.proj.apply(d.commutator(d.mark(0), d.mark(1))).is_identity());
    CHECK(!q.group.is_trivial_group());
    CHECK(q.group.central().is_trivial());
  }
  SUBCASE("quotient by 2a keeps torsion") {
    Nil2Element two_a = d.scaled(2, d.mark(0));
    auto q = quotient_datum(d, {two_a});
    CHECK(q.group.validate().ok());
    CHECK(q.proj.apply(two_a).is_identity());
    CHECK(!q.proj.apply(d.mark(0)).is_identity());
    // 2[a,b] must die as lambda(2a, b)
    CHECK(q.proj.apply(d.scaled(2, d.commutator(d.mark(0), d.mark(1)))).is_identity());
  }
  SUBCASE("normal closure inclusion") {
    Nil2Subgroup s{d, {d.mark(0)}};
    CHECK(s.contains(d.scaled(5, d.mark(0))));
    CHECK(!s.contains(d.mark(1)));
    CHECK(!s.is_normal());  // [b,a] not in <a>
  }
}

TEST_CASE("nil2 coproduct") {
  Nil2Datum z1 = Nil2Datum::from_abelian(FgAbelianGroup::free(1));
  Nil2Coproduct cp = nil2_coproduct(z1, z1);
  // free(1) v free(1) in Nil = free nil2 of rank 2
  Nil2Datum f2 = Nil2Datum::free_nil2(2);
  CHECK(cp.group.validate().ok());
  CHECK(cp.group.rank() == 2);
  CHECK(cp.group.central().invariant_factors() == f2.central().invariant_factors());
  CHECK(cp.inj_left.validate().ok());
  CHECK(cp.inj_right.validate().ok());
  // jaminilsi pairing: [i1(x), i2(y)] generates the kernel block
  Nil2Element comm = cp.group.commutator(cp.inj_left.apply(z1.mark(0)),
                                         cp.inj_right.apply(z1.mark(0)));
  CHECK(!comm.is_identity());
  CHECK(cp.group.is_central(comm));
}

TEST_CASE("hom kernels two-stage") {
  // mod-2 projection of Z as datum
  Nil2Datum z = Nil2Datum::from_abelian(FgAbelianGroup::free(1));
  Nil2Datum z2 = Nil2Datum::from_abelian(FgAbelianGroup::from_factors({2}));
  Vec e0{Int(1)};
  Nil2Hom h(z, z2, {z2.lattice_elt(e0)});
  CHECK(h.validate().ok());
  auto kg = hom_kernel_gens(h);
  Nil2Subgroup ker{z, kg};
  CHECK(ker.contains(z.scaled(2, z.mark(0))));
  CHECK(!ker.contains(z.mark(0)));
  CHECK(hom_is_surjective(h));
  CHECK(!hom_is_injective(h));
}

TEST_CASE("quad_descends") {
  FreeNil2Group f({"s", "t"});
  const Nil2Datum& d = f.datum();
  auto z = FgAbelianGroup::free(1);
  QuadraticMap zero = QuadraticMap::zero(d, z);
  std::vector<Nil2Element> rels = {f.parse_word("s s"), f.parse_word("t s -t")};
  SUBCASE("zero map descends through anything") { CHECK(quad_descends(zero, rels)); }
  SUBCASE("H of znil_set against no relations") {
    TensorAb sq = fgab_tensor(d.abelianization(), d.abelianization());
    SparseForm phi;
    auto cls = [&](std::size_t i) { return d.ab_class(d.mark(i)); };
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) phi[{i, j}] = sq.pair(cls(j), cls(i));
    std::vector<FgabElement> values(d.nmarks(), sq.group.zero());
    values[2] = phi[{0, 1}] - phi[{1, 0}];
    QuadraticMap h(d, sq.group, values, phi);
    CHECK(quad_descends(h, {}));
  }
  SUBCASE("nonvanishing relator is reported with a witness") {
    QuadraticMap f1(d, z, {z.canonical_gen(0), z.zero(), z.zero()}, {});
    std::string w;
    CHECK(!quad_descends(f1, {f.parse_word("s")}, &w));
    CHECK(w.find("relator 0") != std::string::npos);
  }
}
