#include "fanetkoop/cli.hpp"

int main(int argc, char** argv) { return fanetkoop::cli_main(argc, argv); }
