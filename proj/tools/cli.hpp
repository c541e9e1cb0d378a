// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace paftrack {

// Entry point behind main(); exposed so tests can drive the CLI in-process.
// Exit codes: 0 success, 1 validation/data failure, 2 usage error.
int cli_main(int argc, const char* const* argv);

}  // namespace paftrack
