#include "maxgas/thermo.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace maxgas {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double partition_Z(double beta, const Vec3& zeta, const KineticConstants& kc) {
    const double gauss = std::pow(kTwoPi * kc.m / beta, 1.5);
    const double drift = std::exp(kc.m * norm2(zeta) / (2.0 * beta));
    return gauss * drift / (kc.epsilon * kc.epsilon * kc.epsilon);
}

} // namespace

FieldPoint make_field_point(double rho, const Vec3& u, double theta, const KineticConstants& kc) {
    kc.validate();
    if (!(rho > 0.0)) throw std::domain_error("field point: rho must be positive");
    if (!(theta > 0.0)) throw std::domain_error("field point: theta must be positive");
    const double N = rho * kc.a * kc.a * kc.a / kc.m;
    if (!(N < 1.0)) {
        throw std::domain_error("field point: occupation N = " + std::to_string(N) +
                                " >= 1 (site overfull)");
    }
    FieldPoint f;
    f.rho = rho;
    f.u = u;
    f.theta = theta;
    f.N = N;
    f.E = N * (1.5 * kc.k_B * theta + 0.5 * kc.m * norm2(u));
    f.pi = rho * u;
    return f;
}

LteParams lte_from_fields(const FieldPoint& f, const KineticConstants& kc) {
    if (!(f.theta > 0.0)) throw std::domain_error("lte_from_fields: theta must be positive");
    if (!(f.N > 0.0) || !(f.N < 1.0)) {
        throw std::domain_error("lte_from_fields: occupation must lie in (0, 1)");
    }
    LteParams p;
    p.beta = 1.0 / (kc.k_B * f.theta);
    p.zeta = -p.beta * f.u;
    p.Z = partition_Z(p.beta, p.zeta, kc);
    // exp(-xi) Z = N/(1-N) inverts the occupation identity exactly.
    p.xi = std::log(p.Z) - std::log(f.N / (1.0 - f.N));
    p.Xi = 1.0 / (1.0 - f.N);
    return p;
}

LteParams lte_from_fields(double rho, const Vec3& u, double theta, const KineticConstants& kc) {
    return lte_from_fields(make_field_point(rho, u, theta, kc), kc);
}

FieldPoint fields_from_lte(const LteParams& p, const KineticConstants& kc) {
    kc.validate();
    if (!(p.beta > 0.0)) throw std::domain_error("fields_from_lte: beta must be positive");
    const double Z = partition_Z(p.beta, p.zeta, kc);
    const double Xi = 1.0 + std::exp(-p.xi) * Z;
    const double N = (Xi - 1.0) / Xi;
    const Vec3 u = -(1.0 / p.beta) * p.zeta;
    const double theta = 1.0 / (kc.k_B * p.beta);
    const double rho = kc.m * N / (kc.a * kc.a * kc.a);
    return make_field_point(rho, u, theta, kc);
}

double maxwell_pdf(const FieldPoint& f, const Vec3& k, const KineticConstants& kc) {
    const double beta = 1.0 / (kc.k_B * f.theta);
    const Vec3 dk = k - kc.m * f.u;
    const double norm = std::pow(beta / (kTwoPi * kc.m), 1.5);
    return norm * std::exp(-beta * norm2(dk) / (2.0 * kc.m));
}

double equation_of_state(double N, double theta, double V, double V0, const KineticConstants& kc) {
    if (!(V0 > 0.0)) throw std::domain_error("equation_of_state: V0 must be positive");
    if (!(V > V0)) throw std::domain_error("equation_of_state: V must exceed V0");
    if (!(theta > 0.0)) throw std::domain_error("equation_of_state: theta must be positive");
    if (!(N >= 0.0)) throw std::domain_error("equation_of_state: N must be non-negative");
    return kc.k_B * theta / V0 * N * std::log1p(V0 / (V - V0));
}

double entropy(std::span<const double> mu, double k_B) {
    double s = 0.0;
    for (double w : mu) {
        if (w < 0.0) throw std::domain_error("entropy: negative weight");
        if (w > 0.0) s -= w * std::log(w);
    }
    return k_B * s;
}

} // namespace maxgas
