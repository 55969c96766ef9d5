#include "lamof/cli.hpp"

int main(int argc, char** argv) { return lamof::cli::run(argc, argv); }
