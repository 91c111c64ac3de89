// Compares the sampled H-stability regions of IMKG232a and IMKG232b.
#include <iostream>

#include "imkg/imkg.hpp"

int main() {
    using namespace imkg;
    for (const char* name : {"IMKG232a", "IMKG232b"}) {
        const auto t = lookup(name).tableau();
        const auto g = scan_grid(t, default_window(t));
        const auto gm = min_gamma(g, 2.0);
        std::cout << name << ": T_2 contained " << (region_T_contained(g, 2.0) ? "yes" : "no")
                  << ", stable width " << stable_column_width(g) << ", gamma_min "
                  << (gm ? std::to_string(*gm) : "none") << '\n';
    }
}
