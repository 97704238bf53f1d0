// cli.hpp
// Command-line surface. Exit codes: 0 success, 2 configuration error,
// 3 solver failure (or failed replay).
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace molspec {

int cli_main(int argc, const char* const* argv);

}  // namespace molspec
