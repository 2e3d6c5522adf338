#include <iostream>

#include "btj/cli.hpp"

int main(int argc, char** argv) {
    return btj::cli::run(argc, argv, std::cout, std::cerr);
}
