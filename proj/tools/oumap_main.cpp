// oumap_main.cpp — executable wrapper around the library CLI
#include "oumap/cli.hpp"

int main(int argc, char** argv) { return oumap::cli::main(argc, argv); }
