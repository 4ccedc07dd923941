#include "fibosc/cli.hpp"

int main(int argc, char** argv) {
    return fibosc::cli::run(argc, argv);
}
