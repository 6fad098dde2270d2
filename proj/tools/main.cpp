#include "cli.hpp"

int main(int argc, char** argv) { return graspeeg::run_cli(argc, argv); }
