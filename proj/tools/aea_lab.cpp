#include "aea/cli.hpp"

int main(int argc, char** argv) { return aea::cli::main(argc, argv); }
