/// @file special.hpp
/// @brief Modified Bessel evaluation and the closed-form heat kernel used as
///        the independent oracle for the one-dimensional radial operator.
#pragma once

namespace singulax {

/// exp(-x) * I_nu(x) for x >= 0 and nu > -1.
/// Power series below the crossover, scaled asymptotic expansion above;
/// both branches are overflow-safe for the whole usable range.
double scaled_bessel_i(double nu, double x);

/// Heat kernel at time t > 0 of D_yy + (c/y) D_y on (0, infinity) with the
/// weighted reflection condition at 0, taken with respect to rho^c d(rho):
///   p(t,y,rho) = (2t)^{-1} (y rho)^{-(c-1)/2} e^{-(y^2+rho^2)/(4t)} I_{(c-1)/2}(y rho / (2t)).
/// Valid for c > -1; y = 0 and rho = 0 are regular limit values.
double bessel_heat_kernel(double c, double t, double y, double rho);

/// Reflected-Gaussian (method of images) kernel; equals the c = 0 case above
/// and is kept as an algebraically independent check path.
double reflected_gaussian_kernel(double t, double y, double rho);

/// d/dy of the reflected-Gaussian kernel.
double reflected_gaussian_kernel_dy(double t, double y, double rho);

} // namespace singulax
