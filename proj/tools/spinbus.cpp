#include "spinbus/cli.hpp"

int main(int argc, char** argv) { return spinbus::cli::run(argc, argv); }
