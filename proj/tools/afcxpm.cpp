#include "afcxpm/cli/commands.hpp"

int main(int argc, char** argv) { return afcxpm::cli::run_cli(argc, argv); }
