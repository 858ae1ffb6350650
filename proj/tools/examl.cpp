#include "cli.hpp"

int main(int argc, char** argv) { return examl::cli::run(argc, argv); }
