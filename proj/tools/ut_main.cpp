#include "ut/cli.hpp"

int main(int argc, char** argv) { return ut::cli::run(argc, argv); }
