#pragma once

// Named fixtures shared by the CLI, the tests and the acceptance suite.

#include "sqg/sqcore.hpp"

namespace sqg {

struct RegistryEntry {
  std::string name;
  SquareGroup sq;
  bool in_sigma = false;  // member of the Sigma subcategory
};

const std::vector<RegistryEntry>& registry();
SquareGroup registry_get(const std::string& name);
bool registry_has(const std::string& name);
std::vector<std::string> registry_names();
std::vector<std::string> sigma_names();

}  // namespace sqg
