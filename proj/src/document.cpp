#include "sqg/document.hpp"

#include <json.hpp>

#include <algorithm>
#include <future>
#include <sstream>

#include "sqg/acceptance.hpp"
#include "sqg/boxcomp.hpp"
#include "sqg/cosym.hpp"
#include "sqg/homotopy.hpp"
#include "sqg/qrings.hpp"
#include "sqg/tensor.hpp"

namespace sqg {

bool SqDocument::has_square(const std::string& name) const {
  return squares.count(name) > 0 || registry_has(name);
}

SquareGroup SqDocument::square(const std::string& name) const {
  auto it = squares.find(name);
  if (it != squares.end()) return it->second;
  if (registry_has(name)) return registry_get(name);
  throw SqgError("unresolved square group reference: " + name);
}

FgAbelianGroup SqDocument::abelian(const std::string& name) const {
  auto it = abelians.find(name);
  if (it != abelians.end()) return it->second;
  throw SqgError("unresolved abelian group reference: " + name);
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c == '{' || c == '}' || c == ',' || c == '[' || c == ']' || c == '(' || c == ')') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
      out.push_back(std::string(1, c));
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

[[noreturn]] void fail_at(std::size_t lineno, const std::string& what) {
  throw SqgError("line " + std::to_string(lineno) + ": " + what);
}

}  // namespace

SqDocument parse_document(const std::string& text) {
  SqDocument doc;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::vector<std::string> tok = tokenize(line);
    if (tok.empty()) continue;
    if (tok[0] == "abelian") {
      if (tok.size() < 4 || tok[2] != "=") fail_at(lineno, "expected: abelian NAME = [d1,d2,...]");
      const std::string& name = tok[1];
      if (doc.abelians.count(name)) fail_at(lineno, "duplicate abelian name " + name);
      if (tok[3] != "[") fail_at(lineno, "expected invariant factor list");
      Vec factors;
      std::size_t i = 4;
      while (i < tok.size() && tok[i] != "]") {
        if (tok[i] == ",") {
          ++i;
          continue;
        }
        try {
          factors.push_back(Int(tok[i]));
        } catch (...) {
          fail_at(lineno, "bad integer " + tok[i]);
        }
        ++i;
      }
      if (i >= tok.size()) fail_at(lineno, "unterminated factor list");
      doc.abelians.emplace(name, FgAbelianGroup::from_factors(factors));
      doc.ab_order.push_back(name);
      std::string decl = "[";
      for (std::size_t k = 0; k < factors.size(); ++k)
        decl += (k ? "," : "") + factors[k].str();
      decl += "]";
      doc.ab_decl[name] = decl;
    } else if (tok[0] == "square") {
      if (tok.size() < 4 || tok[2] != "=") fail_at(lineno, "expected: square NAME = CONSTRUCTOR");
      const std::string& name = tok[1];
      if (doc.squares.count(name)) fail_at(lineno, "duplicate square name " + name);
      const std::string& ctor = tok[3];
      SquareGroup sq;
      std::string decl;
      auto names_in_braces = [&](std::size_t start) {
        std::vector<std::string> names;
        if (start >= tok.size() || tok[start] != "{") fail_at(lineno, "expected { ... }");
        for (std::size_t i = start + 1; i < tok.size() && tok[i] != "}"; ++i)
          if (tok[i] != ",") names.push_back(tok[i]);
        return names;
      };
      if (ctor == "znil") {
        sq = znil();
        decl = "znil";
      } else if (ctor == "znil_set") {
        auto names = names_in_braces(4);
        sq = znil_set(names);
        decl = "znil_set{";
        for (std::size_t k = 0; k < names.size(); ++k) decl += (k ? "," : "") + names[k];
        decl += "}";
      } else if (ctor == "atensor") {
        if (tok.size() < 5) fail_at(lineno, "atensor needs an abelian group name");
        if (!doc.abelians.count(tok[4])) fail_at(lineno, "unresolved reference " + tok[4]);
        sq = a_tensor(doc.abelian(tok[4]));
        decl = "atensor " + tok[4];
      } else if (ctor == "from_abelian") {
        if (tok.size() < 5) fail_at(lineno, "from_abelian needs an abelian group name");
        if (!doc.abelians.count(tok[4])) fail_at(lineno, "unresolved reference " + tok[4]);
        sq = from_abelian(doc.abelian(tok[4]));
        decl = "from_abelian " + tok[4];
      } else if (ctor == "zq") {
        sq = zq();
        decl = "zq";
      } else if (ctor == "vfree") {
        if (tok.size() < 5) fail_at(lineno, "vfree needs a size");
        sq = v_free(std::stoul(tok[4]));
        decl = "vfree " + tok[4];
      } else if (registry_has(ctor) && tok.size() == 4) {
        sq = registry_get(ctor);
        decl = ctor;
      } else {
        fail_at(lineno, "unknown constructor " + ctor);
      }
      Report v = validate_square_group(sq);
      if (!v.ok())
        fail_at(lineno, "declared square group fails validation: " + v.first_failure()->name);
      doc.squares.emplace(name, sq);
      doc.sq_order.push_back(name);
      doc.sq_decl[name] = decl;
    } else {
      fail_at(lineno, "unknown declaration " + tok[0]);
    }
  }
  return doc;
}

std::string emit_document(const SqDocument& doc) {
  std::ostringstream os;
  for (const auto& name : doc.ab_order) os << "abelian " << name << " = " << doc.ab_decl.at(name) << "\n";
  for (const auto& name : doc.sq_order) os << "square " << name << " = " << doc.sq_decl.at(name) << "\n";
  return os.str();
}

namespace {

void summarize(Report& rep, const std::string& name, const SquareGroup& m) {
  rep.pass("object " + name + ": e-ab = " + m.e().abelianization().str() +
           ", ee = " + m.ee().str() + ", CokP = " + m.cokp().str());
}

Report invariants_report(const std::string& name, const SquareGroup& m) {
  Report rep;
  summarize(rep, name, m);
  rep.merge(validate_square_group(m), "axioms-");
  DerivedData d = derive(m);
  rep.merge(d.invariants, "derived-");
  rep.pass("T matrix = " + d.t.matrix().str());
  rep.pass("Delta matrix = " + d.delta.matrix().str());
  rep.pass(std::string("k nonzero = ") + (d.k.is_zero() ? "no" : "yes"));
  rep.pass(std::string("SG_Sigma member = ") + (is_sg_sigma(m) ? "yes" : "no"));
  return rep;
}

}  // namespace

Report run_command(const std::vector<std::string>& args, const SqDocument& doc,
                   std::size_t threads) {
  Report rep;
  if (args.empty()) {
    rep.fail("usage", "no subcommand");
    return rep;
  }
  const std::string& cmd = args[0];
  auto need = [&](std::size_t n, const std::string& what) {
    if (args.size() < n + 1) throw SqgError(cmd + " needs " + what);
  };
  if (cmd == "validate") {
    std::vector<std::string> names(args.begin() + 1, args.end());
    if (names.empty()) names = registry_names();
    std::sort(names.begin(), names.end());
    for (const auto& n : names) rep.merge(validate_square_group(doc.square(n)), n + "-");
  } else if (cmd == "tensor") {
    need(2, "two square group names");
    TensorProduct t = tensor(doc.square(args[1]), doc.square(args[2]));
    rep.pass("tensor e-ab = " + t.result.e().abelianization().str() +
             ", ee = " + t.result.ee().str());
    rep.merge(validate_square_group(t.result), "result-");
    rep.merge(tensor_relations_check(t), "relations-");
  } else if (cmd == "box") {
    need(2, "two square group names");
    BoxProduct b = box(doc.square(args[1]), doc.square(args[2]));
    rep.pass("box e-ab = " + b.result.e().abelianization().str() +
             ", ee = " + b.result.ee().str());
    rep.merge(validate_square_group(b.result), "result-");
    rep.merge(box_relations_check(b), "relations-");
  } else if (cmd == "coproduct") {
    need(2, "two square group names");
    SgCoproduct cp = coproduct(doc.square(args[1]), doc.square(args[2]));
    rep.pass("coproduct e-ab = " + cp.group.e().abelianization().str() +
             ", ee = " + cp.group.ee().str());
    rep.merge(validate_square_group(cp.group), "result-");
    rep.merge(cp.inj_left.validate(), "inj-left-");
    rep.merge(cp.inj_right.validate(), "inj-right-");
  } else if (cmd == "invariants") {
    need(1, "a square group name");
    rep.merge(invariants_report(args[1], doc.square(args[1])), "");
  } else if (cmd == "coherence") {
    need(1, "a mode flag");
    if (args[1] == "--pentagon") {
      need(5, "four square group names");
      rep.merge(verify_pentagon(doc.square(args[2]), doc.square(args[3]), doc.square(args[4]),
                                doc.square(args[5])),
                "");
    } else if (args[1] == "--hexagon") {
      need(4, "three square group names");
      rep.merge(verify_hexagons(doc.square(args[2]), doc.square(args[3]), doc.square(args[4])), "");
    } else if (args[1] == "--unit") {
      need(2, "a square group name");
      SquareGroup m = doc.square(args[2]);
      TensorProduct tl = tensor_general(znil(), m);
      SgMorphism iota = unit_left_iso(tl), iota_inv = unit_left_inv(tl);
      rep.check(iota.validate().ok() && iota_inv.then(iota).equals(SgMorphism::identity(m)) &&
                    iota.then(iota_inv).equals(SgMorphism::identity(tl.result)),
                "unit-left");
      TensorProduct tr2 = tensor_general(m, znil());
      SgMorphism kap = unit_right_iso(tr2), kap_inv = unit_right_inv(tr2);
      rep.check(kap.validate().ok() && kap_inv.then(kap).equals(SgMorphism::identity(m)) &&
                    kap.then(kap_inv).equals(SgMorphism::identity(tr2.result)),
                "unit-right");
      rep.merge(verify_triangle(m, znil()), "");
    } else {
      rep.fail("usage", "coherence mode must be --pentagon, --hexagon or --unit");
    }
  } else if (cmd == "homotopy") {
    need(1, "a square group name");
    std::size_t maxd = 4;
    for (std::size_t i = 2; i + 1 < args.size() + 1; ++i)
      if (args[i] == "--max" && i + 1 < args.size()) maxd = std::stoul(args[i + 1]);
    SquareGroup m = doc.square(args[1]);
    for (std::size_t i = 0; i <= maxd; ++i)
      rep.pass("pi_" + std::to_string(i) + " = " + spectrum_homotopy(m, i).str());
    KPostnikov kp = k_postnikov(m);
    rep.pass(std::string("k-invariant nonzero = ") + (kp.k.is_zero() ? "no" : "yes"));
  } else if (cmd == "tor1") {
    need(2, "an abelian group name and a square group name");
    FgAbelianGroup a = doc.abelians.count(args[1]) ? doc.abelian(args[1])
                                                   : doc.square(args[1]).e().abelianization();
    SquareGroup m = doc.square(args[2]);
    SquareGroup t = tor1_atensor(a, m);
    rep.pass("Tor1 ee = " + t.ee().str() + ", e-ab = " + t.e().abelianization().str());
    rep.merge(tor1_atensor_crosscheck(a, m), "crosscheck-");
  } else if (cmd == "ring-validate") {
    need(1, "a ring name: znil | mon2 | lz3");
    QuadraticRing r = args[1] == "znil"  ? qring_znil()
                      : args[1] == "mon2" ? monoid_ring(Monoid::cyclic2())
                      : args[1] == "lz3"  ? monoid_ring(Monoid::left_zero3())
                                          : throw SqgError("unknown ring " + args[1]);
    rep.merge(validate_qring(r), "qring-");
    rep.pass(std::string("commutative = ") + (is_commutative_qring(r) ? "yes" : "no"));
    rep.merge(validate_sqring(qr_to_sr(r)), "sqring-");
  } else if (cmd == "psi") {
    need(1, "a ring name");
    QuadraticRing r = args[1] == "znil"  ? qring_znil()
                      : args[1] == "mon2" ? monoid_ring(Monoid::cyclic2())
                                          : throw SqgError("unknown ring " + args[1]);
    rep.merge(psi_checks(r), "");
  } else if (cmd == "cosym-roundtrip") {
    need(1, "a square group name");
    SquareGroup m = doc.square(args[1]);
    if (!is_sg_sigma(m)) {
      rep.skip("cosym-roundtrip", args[1] + " is not in the Sigma subcategory");
    } else {
      rep.merge(sg_roundtrip(m), "");
      rep.merge(cosym_roundtrip(Psi(m)), "");
    }
  } else if (cmd == "suite") {
    rep.merge(run_acceptance(threads), "");
  } else {
    rep.fail("usage", "unknown subcommand " + cmd);
  }
  return rep;
}

std::string emit_report_text(const Report& r) {
  std::string s = r.str();
  s += r.ok() ? "RESULT: pass\n" : "RESULT: FAIL (" + std::to_string(r.failures()) + ")\n";
  return s;
}

std::string emit_report_machine(const Report& r) {
  nlohmann::ordered_json j;
  j["schema"] = "sqgroups-report/1";
  j["ok"] = r.ok();
  j["failures"] = r.failures();
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["status"] = c.status == CheckStatus::Pass   ? "pass"
                  : c.status == CheckStatus::Fail ? "fail"
                                                  : "skip";
    if (!c.witness.empty()) e["witness"] = c.witness;
    checks.push_back(e);
  }
  j["checks"] = checks;
  return j.dump(2) + "\n";
}

}  // namespace sqg
