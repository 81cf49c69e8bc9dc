#include <iostream>

#include "mtk/cli.hpp"

int main(int argc, char** argv) { return mtk::run_cli(argc, argv, std::cout, std::cerr); }
