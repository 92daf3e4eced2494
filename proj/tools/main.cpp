#include <iostream>

#include "commands.hpp"
#include "ndpc/training.hpp"

int main(int argc, char** argv) {
  ndpc::tune_allocator();
  return ndpc::cli::run(argc, argv, std::cerr, std::cerr);
}
