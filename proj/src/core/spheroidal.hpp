#pragma once

namespace qrng {

// 0th radial prolate spheroidal wavefunction of the first kind, m = 0,
// evaluated at the edge of the unit interval: R00(c, xi = 1).
// If chi00 is non-null it receives the separation constant lambda_00(c).
double prolate_radial1_00(double c, double* chi00 = nullptr);

// Largest eigenvalue of the sinc kernel sin(c(x-y))/(pi(x-y)) on [-1,1]^2:
// lambda_0(c) = (2c/pi) * R00(c,1)^2. Lies strictly inside (0, 1) and is
// strictly increasing in c.
double sinc_kernel_top_eigenvalue(double c);

} // namespace qrng
