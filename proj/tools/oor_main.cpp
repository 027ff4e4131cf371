#include <iostream>

#include "oor/editing.hpp"
#include "oor/json_io.hpp"
#include "oor/metrics.hpp"
#include "oor/obj_io.hpp"

int main(int argc, char** argv) {
    (void)argc;
    (void)argv;
    std::cerr << "oor: not wired up yet\n";
    return 2;
}
