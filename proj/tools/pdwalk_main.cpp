#include "pdw/cli.hpp"

int main(int argc, char** argv) { return pdw::run_cli(argc, argv); }
