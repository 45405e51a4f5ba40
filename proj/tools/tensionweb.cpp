#include <tensionweb/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return tensionweb::run_cli(argc, argv, std::cout, std::cerr); }
