#include "ultracoral/cli.hpp"

int main(int argc, char** argv) { return ultracoral::cli_main(argc, argv); }
