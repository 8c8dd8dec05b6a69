#include "stpot/cli.hpp"

int main(int argc, char** argv) { return stpot::cli::run(argc, argv); }
