#include "cli.hpp"

int main(int argc, char** argv) { return daa::cli::run(argc, argv); }
