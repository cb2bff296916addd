#include "spt/experiments.hpp"

int main(int argc, char** argv) { return spt::cli::main(argc, argv); }
