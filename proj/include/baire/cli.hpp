// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace baire {

// Exit codes: 0 success, 1 falsified/refuted verdict, 2 usage or input error,
// 3 internal limitation (unrepresentable result, overflow, budget exhausted).
int cli_main(int argc, char** argv);

} // namespace baire
