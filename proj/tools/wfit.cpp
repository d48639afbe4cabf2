#include "wfit/cli.hpp"

int main(int argc, char** argv) { return wfit::cli::run_cli(argc, argv); }
