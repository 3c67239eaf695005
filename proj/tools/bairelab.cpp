// SPDX-License-Identifier: Apache-2.0
// CLI entry point; subcommands are wired up in src/cli.cpp.
#include "baire/cli.hpp"

int main(int argc, char** argv) {
    return baire::cli_main(argc, argv);
}
