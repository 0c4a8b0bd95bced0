#include "cli.hpp"

int main(int argc, char** argv) { return gmc::cli::main(argc, argv); }
