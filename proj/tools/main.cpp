#include "clsym/cli.hpp"

int main(int argc, char** argv) { return clsym::cli::run(argc, argv); }
