// Integrates a small vertical velocity pulse in the acoustic column and prints the final profile.
#include <iostream>

#include "imkg/imkg.hpp"

int main() {
    using namespace imkg;
    const auto bg = ColumnBackground::isothermal(20);
    const AcousticColumn col(bg);
    auto p = acoustic_column(bg);
    p.initial_state = perturbed_column_state(col, 0.5);
    const auto tr = integrate(lookup("IMKG343a").tableau(), p, p.initial_state, 0.0, 60.0, 2.0);
    int max_iters = 0;
    for (int k : tr.newton_iterations) max_iters = std::max(max_iters, k);
    std::cerr << "steps " << tr.stats.steps << ", implicit solves " << tr.stats.implicit_solves
              << ", max Newton iterations per step " << max_iters << '\n';
    col.write_snapshot_csv(tr.final_state(), std::cout);
}
