// Python bindings for the main operations.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sqg/acceptance.hpp"
#include "sqg/boxcomp.hpp"
#include "sqg/cosym.hpp"
#include "sqg/document.hpp"
#include "sqg/homotopy.hpp"
#include "sqg/qrings.hpp"
#include "sqg/tensor.hpp"

namespace py = pybind11;
using namespace sqg;

namespace {

py::list factors(const FgAbelianGroup& g) {
  py::list out;
  for (const auto& f : g.invariant_factors()) out.append(py::int_(py::str(f.str())));
  return out;
}

py::dict report_dict(const Report& r) {
  py::dict out;
  out["ok"] = r.ok();
  py::list checks;
  for (const auto& c : r.checks) {
    py::dict e;
    e["name"] = c.name;
    e["status"] = c.status == CheckStatus::Pass   ? "pass"
                  : c.status == CheckStatus::Fail ? "fail"
                                                  : "skip";
    if (!c.witness.empty()) e["witness"] = c.witness;
    checks.append(e);
  }
  out["checks"] = checks;
  return out;
}

SquareGroup get(const std::string& name) { return registry_get(name); }

}  // namespace

PYBIND11_MODULE(_sqgroups, m) {
  m.doc() = "exact computer algebra for square groups and their tensor product";

  m.def("registry_names", &registry_names, "names of the built-in square groups");
  m.def("sigma_names", &sigma_names, "registry objects in the Sigma subcategory");

  m.def(
      "validate",
      [](const std::string& name) { return report_dict(validate_square_group(get(name))); },
      py::arg("name"));

  m.def(
      "invariants",
      [](const std::string& name) {
        SquareGroup sq = get(name);
        DerivedData d = derive(sq);
        py::dict out;
        out["e_ab"] = factors(sq.e().abelianization());
        out["ee"] = factors(sq.ee());
        out["cokp"] = factors(sq.cokp());
        out["T"] = d.t.matrix().str();
        out["delta"] = d.delta.matrix().str();
        out["k_nonzero"] = !d.k.is_zero();
        out["sg_sigma"] = is_sg_sigma(sq);
        out["derived_ok"] = d.invariants.ok();
        return out;
      },
      py::arg("name"));

  m.def(
      "tensor",
      [](const std::string& a, const std::string& b) {
        TensorProduct t = tensor(get(a), get(b));
        py::dict out;
        out["e_ab"] = factors(t.result.e().abelianization());
        out["ee"] = factors(t.result.ee());
        out["valid"] = validate_square_group(t.result).ok();
        out["relations_ok"] = tensor_relations_check(t).ok();
        return out;
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "box",
      [](const std::string& a, const std::string& b) {
        BoxProduct bx = box(get(a), get(b));
        py::dict out;
        out["e_ab"] = factors(bx.result.e().abelianization());
        out["ee"] = factors(bx.result.ee());
        out["valid"] = validate_square_group(bx.result).ok();
        out["sigma_iso"] = sigma(bx, tensor(get(a), get(b))).is_iso();
        return out;
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "coproduct",
      [](const std::string& a, const std::string& b) {
        SgCoproduct cp = coproduct(get(a), get(b));
        py::dict out;
        out["e_ab"] = factors(cp.group.e().abelianization());
        out["ee"] = factors(cp.group.ee());
        out["valid"] = validate_square_group(cp.group).ok();
        return out;
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "homotopy",
      [](const std::string& name, std::size_t max_degree) {
        py::list out;
        for (const auto& g : spectrum_homotopy_range(get(name), max_degree)) out.append(factors(g));
        return out;
      },
      py::arg("name"), py::arg("max_degree") = 4);

  m.def(
      "tor1",
      [](const std::vector<long long>& fs, const std::string& name) {
        Vec v;
        for (auto f : fs) v.push_back(f);
        SquareGroup t = tor1_atensor(FgAbelianGroup::from_factors(v), get(name));
        py::dict out;
        out["e_ab"] = factors(t.e().abelianization());
        out["ee"] = factors(t.ee());
        return out;
      },
      py::arg("factors"), py::arg("name"));

  m.def(
      "pentagon",
      [](const std::string& a, const std::string& b, const std::string& c, const std::string& d) {
        return verify_pentagon(get(a), get(b), get(c), get(d)).ok();
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"));
  m.def(
      "hexagons",
      [](const std::string& a, const std::string& b, const std::string& c) {
        return verify_hexagons(get(a), get(b), get(c)).ok();
      },
      py::arg("a"), py::arg("b"), py::arg("c"));
  m.def(
      "triangle",
      [](const std::string& a, const std::string& b) { return verify_triangle(get(a), get(b)).ok(); },
      py::arg("a"), py::arg("b"));

  m.def("ring_validate", [](const std::string& which) {
    QuadraticRing r = which == "znil"  ? qring_znil()
                      : which == "mon2" ? monoid_ring(Monoid::cyclic2())
                      : which == "lz3"  ? monoid_ring(Monoid::left_zero3())
                                        : throw SqgError("unknown ring " + which);
    py::dict out;
    out["qring_ok"] = validate_qring(r).ok();
    out["commutative"] = is_commutative_qring(r);
    out["sqring_ok"] = validate_sqring(qr_to_sr(r)).ok();
    return out;
  });

  m.def("psi_values", [](const std::string& which) {
    QuadraticRing r = which == "znil" ? qring_znil() : monoid_ring(Monoid::cyclic2());
    PsiData p = psi_data(r);
    py::dict out;
    out["codomain"] = factors(p.codomain);
    Nil2Element two = r.r.e().scaled(2, r.r.e().mark(0));
    out["psi_of_two_nonzero"] = !p.psi(two).is_zero();
    out["laws_ok"] = psi_checks(r).ok();
    return out;
  });

  m.def(
      "cosym_roundtrip",
      [](const std::string& name) {
        SquareGroup sq = get(name);
        py::dict out;
        out["sg_sigma"] = is_sg_sigma(sq);
        if (is_sg_sigma(sq)) out["roundtrip_ok"] = sg_roundtrip(sq).ok();
        return out;
      },
      py::arg("name"));

  m.def(
      "run_document",
      [](const std::string& text, const std::vector<std::string>& args, std::size_t threads) {
        SqDocument doc = parse_document(text);
        return report_dict(run_command(args, doc, threads));
      },
      py::arg("text"), py::arg("args"), py::arg("threads") = 1);

  m.def(
      "acceptance",
      [](std::size_t threads) { return report_dict(run_acceptance(threads)); },
      py::arg("threads") = 4);
}
