#include <string>
#include <vector>

#include "fairshap/harness.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fairshap::cli_dispatch(args);
}
