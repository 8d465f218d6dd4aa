#pragma once

#include <complex>
#include <span>
#include <vector>

namespace desync::detail {

// Bins 0..n/2 of the unnormalized forward DFT of a real sequence.
void real_dft(std::span<const double> x, std::vector<std::complex<double>>& out);

// x + i*HT(x) through the one-sided spectrum.
void analytic_signal(std::span<const double> x, std::vector<std::complex<double>>& out);

// Real sequence of length n from its bins 0..n/2 (normalized inverse).
void inverse_real_dft(std::span<const std::complex<double>> half, std::size_t n, std::vector<double>& out);

}  // namespace desync::detail
