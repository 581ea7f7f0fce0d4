#pragma once

#include <stdexcept>

namespace maxgas {

/// Microscopic constants of the gas model. `a` is the lattice spacing the
/// continuum description coarse-grains over and `epsilon` the momentum-bin
/// width; both drop out of macroscopic observables but are kept so that
/// occupation numbers and bin probabilities stay well defined.
struct KineticConstants {
    double m = 1.0;        ///< particle mass
    double k_B = 1.0;      ///< Boltzmann constant
    double sigma = 1.0;    ///< collision cross-section
    double a = 1.0;        ///< site spacing
    double epsilon = 1.0;  ///< momentum bin width
    bool nondimensional = true;

    void validate() const {
        if (!(m > 0.0) || !(k_B > 0.0) || !(sigma > 0.0) || !(a > 0.0) || !(epsilon > 0.0)) {
            throw std::domain_error("kinetic constants must all be positive");
        }
    }
};

/// All-unity constants; the default working system.
inline KineticConstants nondimensional_constants(double sigma = 1.0) {
    KineticConstants k;
    k.sigma = sigma;
    k.nondimensional = true;
    return k;
}

} // namespace maxgas
