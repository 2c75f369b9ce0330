#pragma once

#include <limits>
#include <string>

#include "phi4/field.hpp"

namespace phi4 {

/// Norm selector: Lp(p), Sobolev H^alpha, Besov B^alpha_{p,q},
/// Hoelder C^alpha = B^alpha_{inf,inf}.
struct NormSpec {
    enum class Kind { Lp, Sobolev, Besov, Hoelder };

    Kind kind = Kind::Lp;
    double p = 2.0;   // in [1, inf]
    double q = 2.0;   // in [1, inf], Besov only
    double alpha = 0.0;

    static constexpr double inf = std::numeric_limits<double>::infinity();

    static NormSpec Lp(double p) { return {Kind::Lp, p, 2.0, 0.0}; }
    static NormSpec L2() { return Lp(2.0); }
    static NormSpec Linf() { return Lp(inf); }
    static NormSpec Sobolev(double alpha) { return {Kind::Sobolev, 2.0, 2.0, alpha}; }
    static NormSpec H1() { return Sobolev(1.0); }
    static NormSpec Besov(double alpha, double p, double q) { return {Kind::Besov, p, q, alpha}; }
    static NormSpec Hoelder(double alpha) { return {Kind::Hoelder, inf, inf, alpha}; }

    void validate() const;
    std::string str() const;
};

/// Evaluate the requested norm.
///   Lp:      uniform-grid quadrature; L^inf is the grid max (fields are
///            band-limited; no oversampling).
///   H^alpha: (sum_k (1+|k|^2)^alpha |f^(k)|^2)^{1/2}.
///   Besov:   sharp dyadic annuli Delta_j = proj onto 2^{j-1} <= |k| < 2^j
///            (Delta_{-1}: |k| < 1), then l^q over j of 2^{j alpha} ||Delta_j f||_{L^p}.
double norm(const Field& f, const NormSpec& spec);

double lp_norm(const Field& f, double p);
double sobolev_norm(const Field& f, double alpha);
double hoelder_norm(const Field& f, double alpha);

/// Largest dyadic block index present on the grid (|k| <= sqrt(d)*n/2).
int max_dyadic_block(const GridSpec& g);

/// The j-th sharp Littlewood-Paley block of f (j >= -1).
Field dyadic_block(const Field& f, int j);

}  // namespace phi4
