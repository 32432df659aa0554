#include "commands.hpp"

int main(int argc, char** argv) { return noncollapse::cli::run_cli(argc, argv); }
