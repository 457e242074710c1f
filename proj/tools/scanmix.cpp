#include "scanmix/cli.hpp"

int main(int argc, char** argv) { return scanmix::run_cli(argc, argv); }
