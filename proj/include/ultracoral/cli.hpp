#pragma once

namespace ultracoral {

// exit codes: 0 success, 1 usage/validation error, 2 solver failure
int cli_main(int argc, const char* const* argv);

}  // namespace ultracoral
