#include "subdet/cli.hpp"

int main(int argc, char** argv) { return subdet::cli::run(argc, argv); }
