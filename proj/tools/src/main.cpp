#include "fsad/cli/commands.hpp"

int main(int argc, char** argv) { return fsad::cli::main_entry(argc, argv); }
