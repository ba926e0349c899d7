#include "twoline/cli.hpp"

int main(int argc, char** argv) { return twoline::cli::run(argc, argv); }
