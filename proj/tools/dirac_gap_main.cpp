#include "dirac_gap/run.hpp"

#include <iostream>

int main(int argc, char** argv) { return dirac_gap::run_cli(argc, argv, std::cout, std::cerr); }
