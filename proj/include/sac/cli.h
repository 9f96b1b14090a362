#ifndef SAC_CLI_H
#define SAC_CLI_H

#include <ostream>
#include <string>
#include <vector>

namespace sac::cli {

// Exit codes: 0 success, 1 validation or usage error, 2 I/O error.
inline constexpr int kOk = 0;
inline constexpr int kValidation = 1;
inline constexpr int kIo = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sac::cli

#endif  // SAC_CLI_H
