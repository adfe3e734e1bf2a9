#include <string>
#include <vector>

#include "torusmax/cli.hpp"

int main(int argc, char** argv) {
    return torusmax::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
