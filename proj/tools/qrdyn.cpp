#include "qrdyn/cli.hpp"

int main(int argc, char** argv) { return qrdyn::cli::run(argc, argv); }
