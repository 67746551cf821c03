#pragma once

#include <complex>
#include <vector>

namespace veploop::fft {

/// Forward real FFT; returns the half spectrum of size n/2 + 1.
std::vector<std::complex<double>> rfft(const std::vector<double>& x);

/// Inverse of rfft, normalized so that irfft(rfft(x), x.size()) == x.
std::vector<double> irfft(const std::vector<std::complex<double>>& half, int n);

/// 2-D forward real FFT of a row-major h x w array; returns h x (w/2 + 1).
std::vector<std::complex<double>> rfft2(const std::vector<double>& data, int h, int w);

}  // namespace veploop::fft
