#include "mvsys/cli.hpp"

int main(int argc, char** argv) { return mvsys::run_cli(argc, argv); }
