#include "moped/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return moped::cli::run(argc, argv, std::cout, std::cerr);
}
