#pragma once

// Data-parallel inner loops used by the surface model. Each kernel has a
// scalar reference and, on x86-64, an AVX2 variant; the dispatcher picks one
// at runtime. Variants are required to agree bit for bit.

#include <cstddef>
#include <span>

namespace absense::kernels {

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa);

/// True if the running CPU and this build both support the variant.
bool isa_available(Isa isa);

/// The variant used by the dispatching entry points below.
Isa active_isa();

/// Forces a variant (tests, benchmarking). Throws if unavailable.
void force_isa(Isa isa);
void reset_isa();

/// Absorption coefficient A = 1 - |(Zs - eta)/(Zs + eta)|^2, clamped to [0,1],
/// for every sheet impedance (sheet_re[i] + j sheet_im[i]) against a real
/// wave impedance eta.
void absorption_sweep(double eta, std::span<const double> sheet_re,
                      std::span<const double> sheet_im, std::span<double> out);

/// Index of the first maximum. Empty input returns 0.
std::size_t argmax_first(std::span<const double> values);

namespace scalar {
double absorption_one(double eta, double sheet_re, double sheet_im);
void absorption_sweep(double eta, const double* re, const double* im, double* out, std::size_t n);
std::size_t argmax_first(const double* values, std::size_t n);
}  // namespace scalar

namespace avx2 {
void absorption_sweep(double eta, const double* re, const double* im, double* out, std::size_t n);
std::size_t argmax_first(const double* values, std::size_t n);
}  // namespace avx2

}  // namespace absense::kernels
