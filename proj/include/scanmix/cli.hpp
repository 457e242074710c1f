#pragma once

namespace scanmix {

// Full command-line front end. Returns the process exit code: 0 on success,
// 1 on domain errors, 2 on usage errors.
int run_cli(int argc, char** argv);

}  // namespace scanmix
