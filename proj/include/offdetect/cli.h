#ifndef OFFDETECT_CLI_H_
#define OFFDETECT_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "offdetect/error.h"

namespace offdetect {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 2,
  kExitData = 3,
  kExitUsage = 4,
  kExitFingerprint = 5,
};

int ExitCodeFor(ErrorKind kind);

// Environment variable consulted when --resources is absent.
inline constexpr char kResourcesEnv[] = "OFFDETECT_RESOURCES";

// OFFDETECT_RESOURCES if set, else the bundled resource directory.
std::string DefaultResourceDir();

// Runs one command line (args exclude the program name). `in` replaces
// standard input for commands reading from "-".
int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err);

}  // namespace offdetect

#endif  // OFFDETECT_CLI_H_
