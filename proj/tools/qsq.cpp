// Command-line interface for the square-group algebra library.
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sqg/document.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qsq: exact computer algebra for square groups"};
  app.require_subcommand(0);
  std::string doc_path, format = "text";
  std::size_t threads = 1;
  if (const char* env = std::getenv("SQG_THREADS")) threads = std::strtoul(env, nullptr, 10);
  app.add_option("--doc", doc_path, "document with named declarations");
  app.add_option("--format", format, "text | machine")->check(CLI::IsMember({"text", "machine"}));
  app.add_option("--threads", threads, "worker threads for the suite");
  app.allow_extras();
  CLI11_PARSE(app, argc, argv);

  std::vector<std::string> args = app.remaining();
  if (args.empty()) {
    std::cout << "subcommands: validate [names..] | tensor A B | box A B | coproduct A B |\n"
                 "  invariants M | coherence --pentagon A B C D | coherence --hexagon A B C |\n"
                 "  coherence --unit A | homotopy M [--max N] | tor1 A M |\n"
                 "  ring-validate R | psi R | cosym-roundtrip X | suite\n"
                 "registry objects:";
    for (const auto& n : sqg::registry_names()) std::cout << " " << n;
    std::cout << "\n";
    return 0;
  }
  try {
    sqg::SqDocument doc;
    if (!doc_path.empty()) {
      std::ifstream in(doc_path);
      if (!in) throw sqg::SqgError("cannot open document " + doc_path);
      std::stringstream ss;
      ss << in.rdbuf();
      doc = sqg::parse_document(ss.str());
    }
    sqg::Report rep = sqg::run_command(args, doc, threads);
    std::cout << (format == "machine" ? sqg::emit_report_machine(rep)
                                      : sqg::emit_report_text(rep));
    return rep.ok() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
