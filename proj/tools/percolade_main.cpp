#include "percolade/cli.hpp"

int main(int argc, char** argv) { return percolade::cli_main(argc, argv); }
