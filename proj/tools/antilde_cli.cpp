#include "antilde/cli.hpp"

int main(int argc, char** argv) { return antilde::cli_main(argc, argv); }
