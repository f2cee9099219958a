#include "cuepoint/cli.h"

int main(int argc, char** argv) { return cuepoint::cli::main(argc, argv); }
