#include "mvpr/cli.hpp"

int main(int argc, char** argv) { return mvpr::cli_main(argc, argv); }
