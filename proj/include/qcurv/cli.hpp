#pragma once

#include <string>
#include <vector>

namespace qcurv {

// describe / sweep / verify / oracle; exit codes: 0 ok, 1 check failure,
// 2 configuration error.
int cli_main(const std::vector<std::string>& args);

}  // namespace qcurv
