#include "tfrcorr/cli.hpp"

int main(int argc, char** argv) { return tfrcorr::cli::run_cli(argc, argv); }
