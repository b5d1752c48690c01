#include "chaosdesign/cli.hpp"

int main(int argc, char** argv) { return chaosdesign::cli::main_entry(argc, argv); }
