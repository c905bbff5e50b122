#pragma once

namespace winprob {

double normal_pdf(double z);
double normal_cdf(double z);

// Acklam's rational approximation followed by one Halley step against
// erfc; relative error near machine precision over (0, 1).
double normal_quantile(double p);

// P(Z1 <= h, Z2 <= k) for standard normals with correlation r (Genz, 2004).
double bivariate_normal_cdf(double h, double k, double r);

} // namespace winprob
