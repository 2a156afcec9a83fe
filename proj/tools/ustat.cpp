#include "ustat/cli.hpp"

int main(int argc, char** argv) { return ustat::cli::main(argc, argv); }
