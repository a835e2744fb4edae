#include "manistoch/cli.hpp"

int main(int argc, char** argv) { return manistoch::cli::main_entry(argc, argv); }
