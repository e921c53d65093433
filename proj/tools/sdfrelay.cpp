#include "sdfrelay/cli.hpp"

int main(int argc, char** argv) { return sdfrelay::cli::run(argc, argv); }
