#include "fracvar/cli.hpp"

int main(int argc, char** argv) { return fracvar::cli::main(argc, argv); }
