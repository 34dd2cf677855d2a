#include "kshyp/cli.hpp"

int main(int argc, char **argv) { return kshyp::cli_main(argc, argv); }
