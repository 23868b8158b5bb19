#include "flatmc/selftest.hpp"
#include <cstring>
#include <iostream>
int main(int argc, char** argv) {
    flatmc::selftest::Options opts;
    for (int i = 1; i + 1 < argc + 1; ++i) {
        if (i + 1 < argc && std::strcmp(argv[i], "--seed") == 0) opts.seed = std::stoull(argv[i + 1]);
        if (std::strcmp(argv[i], "--parallel") == 0) opts.parallel = true;
    }
    bool ok = flatmc::selftest::run_acceptance(opts, std::cout);
    return ok ? 0 : 1;
}
