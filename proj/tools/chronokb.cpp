#include <iostream>

#include "chronokb/commands.hpp"

int main(int argc, char** argv) { return chronokb::run_cli(argc, argv, std::cout, std::cerr); }
