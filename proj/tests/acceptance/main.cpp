#include "spinkin/acceptance.hpp"

#include <cstdio>
#include <string>

int main(int argc, char** argv) {
    const std::string which = argc > 1 ? argv[1] : "all";
    int failed = 0;
    for (const auto& c : spinkin::acceptance::checks()) {
        if (which != "all" && which != c.name && which != std::to_string(c.id)) continue;
        const auto r = spinkin::acceptance::run_check(c.id);
        std::printf("%s\n", spinkin::acceptance::format_line(r).c_str());
        std::fflush(stdout);
        if (!r.passed) ++failed;
    }
    std::printf("%d check(s) failed\n", failed);
    return failed == 0 ? 0 : 1;
}
