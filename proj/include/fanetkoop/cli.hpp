#pragma once

namespace fanetkoop {

/// Entry point behind the fanetkoop binary; factored out so tests can drive
/// the CLI in-process. Returns the process exit code (0 ok, 1 validation
/// error, 2 runtime/data error).
int cli_main(int argc, const char* const* argv);

}  // namespace fanetkoop
