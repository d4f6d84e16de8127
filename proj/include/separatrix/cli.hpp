#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace separatrix {

/* Full command-line front end: args is argv without the program name.
 * Returns the process exit code: 0 success, 1 usage/input error, 2 failed
 * or undecidable assumption (under --strict for non-fatal verdicts),
 * 3 numerical failure.  All errors print one line to err:
 *     error: <code>: <message>                                          */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace separatrix
