#include "cli.hpp"

int main(int argc, char** argv) { return rulex::cli::main(argc, argv); }
