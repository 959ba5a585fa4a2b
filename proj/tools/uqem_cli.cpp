#include "uqem/cli.hpp"

int main(int argc, char** argv) { return uqem::cli_main(argc, argv); }
