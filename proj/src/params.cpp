#include "jch/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jch {

void SystemParams::validate() const {
    auto finite = [](double v, const char* name) {
        if (!std::isfinite(v)) throw std::invalid_argument(std::string("SystemParams: ") + name + " is not finite");
    };
    finite(omega_a, "omega_a");
    finite(omega_c, "omega_c");
    finite(g, "g");
    finite(J, "J");
    finite(gamma, "gamma");
    finite(kappa, "kappa");
    finite(Omega, "Omega");
    finite(alpha, "alpha");
    finite(omega_l, "omega_l");
    finite(omega_p, "omega_p");
    if (!(g > 0.0)) throw std::invalid_argument("SystemParams: g must be > 0, got " + std::to_string(g));
    if (gamma < 0.0) throw std::invalid_argument("SystemParams: gamma must be >= 0, got " + std::to_string(gamma));
    if (kappa < 0.0) throw std::invalid_argument("SystemParams: kappa must be >= 0, got " + std::to_string(kappa));
    dims().validate();
}

}  // namespace jch
