#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace tgs {

// Exit codes: 0 ok / Charlie wins; 1 parse or usage error (also: plan not a
// solution for validate/accepts); 2 invalid plan input; 10 Eve wins;
// 20 exploration budget exceeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            std::istream& in);

}  // namespace tgs
