#include <vector>

#include "freight/cli.hpp"

int main(int argc, char** argv) {
    return freight::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
