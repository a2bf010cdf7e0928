#pragma once

#include <iosfwd>

namespace mfd {

// Entry point of the `mfd` command-line tool. Subcommands: eval, nms, fuse,
// flip-merge, atss-sim, fpn-coverage, decode. Returns 0 on success, 1 when an
// input file is unreadable or malformed, 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfd
