#pragma once

// Document model and command runner behind the CLI: named declarations of
// abelian groups and square groups, plus the subcommand surface. Reports are
// deterministic; the machine format is stable JSON mirroring Report fields.

#include <map>
#include <string>
#include <vector>

#include "sqg/registry.hpp"
#include "sqg/report.hpp"

namespace sqg {

struct SqDocument {
  // declaration order is preserved for round-tripping
  std::vector<std::string> ab_order, sq_order;
  std::map<std::string, FgAbelianGroup> abelians;
  std::map<std::string, std::string> ab_decl;  // name -> declaration text
  std::map<std::string, SquareGroup> squares;
  std::map<std::string, std::string> sq_decl;

  bool has_square(const std::string& name) const;
  SquareGroup square(const std::string& name) const;  // falls back to the registry
  FgAbelianGroup abelian(const std::string& name) const;
};

// Parses the documented grammar; throws SqgError with line information.
SqDocument parse_document(const std::string& text);
std::string emit_document(const SqDocument& doc);

// Runs one subcommand; args as on the command line (without the program name).
Report run_command(const std::vector<std::string>& args, const SqDocument& doc,
                   std::size_t threads = 1);

std::string emit_report_text(const Report& r);
std::string emit_report_machine(const Report& r);  // versioned JSON

}  // namespace sqg
