#include "fracell/cli.hpp"

int main(int argc, char** argv) { return fracell::cli_main(argc, argv); }
