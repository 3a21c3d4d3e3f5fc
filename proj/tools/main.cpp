#include "migprop/cli.hpp"

int main(int argc, char** argv) { return migprop::run_cli(argc, argv); }
