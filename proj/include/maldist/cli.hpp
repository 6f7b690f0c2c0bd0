#pragma once

// Command-line front end. Every subcommand reads its options from flags or a
// key=value config file, prints a summary (or the JSON report with --json),
// and returns 0 on success, 1 on a verification failure, 2 on a usage or
// config error.

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace maldist {

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

// The grammar reference printed after usage errors.
const std::string& grammar_reference();

}  // namespace maldist
