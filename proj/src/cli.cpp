// SPDX-License-Identifier: Apache-2.0
#include "baire/cli.hpp"

#include <cstdio>

namespace baire {

int cli_main(int, char**) {
    std::fputs("bairelab: no subcommands wired yet\n", stderr);
    return 2;
}

} // namespace baire
