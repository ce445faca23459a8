#include "dualshapes/cli.hpp"

int main(int argc, char** argv) { return dualshapes::cli_main(argc, argv); }
