#include "spectral_hull/cli.hpp"

int main(int argc, char** argv) { return spectral_hull::run_cli(argc, argv); }
