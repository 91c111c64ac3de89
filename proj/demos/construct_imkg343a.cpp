// Builds the q = 4 third-order method from its free parameters and checks it.
#include <iostream>

#include "imkg/imkg.hpp"

int main() {
    using namespace imkg;
    const auto k = derive_imkg3_q4(1.0, 1.0, 2.0 / 3.0, 0.0);
    const auto t = expand_imkg(k, "IMKG343a-derived");
    std::cout << "alpha    " << join17(k.alpha, " ") << '\n'
              << "alphahat " << join17(k.alpha_hat, " ") << '\n'
              << "dhat     " << join17(k.delta_hat, " ") << '\n';
    std::cout << "order " << classify_order(t) << ", deg Phat " << phat_degree(k) << '\n';
    const auto P = explicit_polynomial_general(t.explicit_part());
    std::cout << "P(z) " << join17(P.coefficients(), " ") << ", r0 " << imaginary_axis_limit(P) << '\n';
    write_tableau(t, std::cout);
}
