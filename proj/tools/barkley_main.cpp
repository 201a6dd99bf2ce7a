#include "barkley/cli.hpp"

int main(int argc, char** argv) { return barkley::cli::dispatch(argc, argv); }
