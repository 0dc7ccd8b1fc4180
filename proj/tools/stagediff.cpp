#include "stagediff/cli.hpp"

int main(int argc, char** argv) { return stagediff::cli_main(argc, argv); }
