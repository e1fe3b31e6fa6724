#include "lftraj/cli.hpp"

int main(int argc, char** argv) { return lftraj::cli::run(argc, argv); }
