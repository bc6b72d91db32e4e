#include "fskmc/cli.hpp"

int main(int argc, char** argv) { return fskmc::cli_main(argc, argv); }
