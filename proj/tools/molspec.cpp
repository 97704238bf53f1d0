// SPDX-License-Identifier: Apache-2.0
#include "molspec/cli.hpp"

int main(int argc, char** argv) { return molspec::cli_main(argc, argv); }
