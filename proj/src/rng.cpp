#include "ltml/rng.hpp"

#include <cmath>
#include <numbers>

namespace ltml {

double RngState::normal() {
    // Box-Muller, sine branch discarded; zero u1 redrawn.
    double u1 = uniform();
    double u2 = uniform();
    while (u1 == 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ltml
