#include "siftcount/cli.hpp"

int main(int argc, char** argv) { return siftcount::run_cli(argc, argv); }
