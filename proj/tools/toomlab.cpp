#include "toomlab/cli.hpp"

int main(int argc, char** argv) { return toomlab::cli::main(argc, argv); }
