#include "cli/cli.hpp"

int main(int argc, char** argv) { return otkit::cli::run(argc, argv); }
