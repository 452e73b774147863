#include "commands.hpp"

int main(int argc, char** argv) {
    return sgm::cli::run(argc, argv);
}
