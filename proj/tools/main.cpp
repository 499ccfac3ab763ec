#include "cli.hpp"

int main(int argc, char** argv) { return latdir::cli::run(argc, argv); }
