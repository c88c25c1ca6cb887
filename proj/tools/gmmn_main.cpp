#include <string>
#include <vector>

#include "gmmn/pipeline.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gmmn::cli::cli_main(args);
}
