#pragma once

#include "winprob/rng.hpp"

#include <string>
#include <string_view>
#include <utility>

namespace winprob {

enum class CopulaFamily { Frank, Gaussian, LowerW, UpperM, Independence };

std::string to_string(CopulaFamily f);
// Accepts frank, gaussian (or normal), lower-w (or w), upper-m (or m), independence (or pi).
CopulaFamily parse_copula_family(std::string_view name);

struct CopulaSpec {
    CopulaFamily family = CopulaFamily::Independence;
    // Frank: theta, finite and nonzero. Gaussian: Pearson correlation of the
    // underlying normals, strictly inside (-1, 1). Unused otherwise.
    double theta = 0.0;

    void validate() const;

    static CopulaSpec frank(double theta) { return {CopulaFamily::Frank, theta}; }
    static CopulaSpec gaussian(double rho) { return {CopulaFamily::Gaussian, rho}; }
    static CopulaSpec lower_w() { return {CopulaFamily::LowerW, 0.0}; }
    static CopulaSpec upper_m() { return {CopulaFamily::UpperM, 0.0}; }
    static CopulaSpec independence() { return {CopulaFamily::Independence, 0.0}; }

    bool operator==(const CopulaSpec&) const = default;
};

std::string to_string(const CopulaSpec& c);

double copula_cdf(double u, double v, const CopulaSpec& c);

// Map an independent uniform pair (u, w) to a pair (u, v) distributed as c,
// by inverting the conditional law of V given U = u at level w.
double conditional_inverse(double u, double w, const CopulaSpec& c);

std::pair<double, double> sample_pair(const CopulaSpec& c, Xoshiro256& rng);

// Spearman's rho = 12 * integral of C over the unit square - 3.
double spearman_rho(const CopulaSpec& c);

// Parameter search range for the Frank family.
inline constexpr double kFrankThetaBound = 50.0;

// Returns the member of `family` with the requested Spearman rho.
// |target| = 1 yields the Frechet-Hoeffding bound; target 0 yields Independence.
CopulaSpec calibrate_to_spearman(CopulaFamily family, double target_rho);

} // namespace winprob
