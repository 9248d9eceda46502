#include "sqg/registry.hpp"

#include <algorithm>

namespace sqg {

namespace {

std::vector<RegistryEntry> build() {
  std::vector<RegistryEntry> out;
  auto cyc = [](long long n) {
    return n == 0 ? FgAbelianGroup::free(1) : FgAbelianGroup::from_factors({n});
  };
  out.push_back({"znil", znil(), true});
  out.push_back({"znil_s", znil_set({"s"}), true});
  out.push_back({"znil_st", znil_set({"s", "t"}), true});
  out.push_back({"zt", a_tensor(FgAbelianGroup::free(1)), false});
  out.push_back({"z2t", a_tensor(cyc(2)), false});
  out.push_back({"z4t", a_tensor(cyc(4)), false});
  out.push_back({"z23t", a_tensor(FgAbelianGroup::from_factors({2, 3})), false});
  out.push_back({"zq", zq(), false});
  out.push_back({"v1", v_free(1), false});
  out.push_back({"v2", v_free(2), false});
  {
    FgAbelianGroup z = FgAbelianGroup::free(1);
    FgabHom tau(z, z, IntMatrix(1, 1, {{-1}}));
    out.push_back({"einv", e_involution(z, tau), false});
  }
  {
    FgAbelianGroup z2f = FgAbelianGroup::free(2);
    IntMatrix swap(2, 2, {{0, 1}, {1, 0}});
    out.push_back({"einv_swap", e_involution(z2f, FgabHom(z2f, z2f, swap)), false});
  }
  out.push_back({"ab_z", from_abelian(FgAbelianGroup::free(1)), false});
  out.push_back({"ab_z2", from_abelian(cyc(2)), false});
  out.push_back({"ab_z3", from_abelian(cyc(3)), false});
  out.push_back({"ab_z4", from_abelian(cyc(4)), false});
  out.push_back({"ab_z6", from_abelian(cyc(6)), false});
  std::sort(out.begin(), out.end(),
            [](const RegistryEntry& a, const RegistryEntry& b) { return a.name < b.name; });
  return out;
}

}  // namespace

const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> reg = build();
  return reg;
}

SquareGroup registry_get(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e.sq;
  throw SqgError("unknown registry object: " + name);
}

bool registry_has(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return true;
  return false;
}

std::vector<std::string> registry_names() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.push_back(e.name);
  return out;
}

std::vector<std::string> sigma_names() {
  std::vector<std::string> out;
  for (const auto& e : registry())
    if (e.in_sigma) out.push_back(e.name);
  return out;
}

}  // namespace sqg
