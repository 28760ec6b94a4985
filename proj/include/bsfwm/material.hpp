#pragma once

#include <array>
#include <filesystem>
#include <string>

namespace bsfwm {

class DataFile;

/// Three-term Sellmeier dispersion of a glass,
/// n² = 1 + Σ bᵢ λ² / (λ² − cᵢ) with λ in µm and cᵢ in µm².
class SellmeierCoefficients {
 public:
  /// Throws ConfigError unless every b ≥ 0, every c > 0 and pairwise distinct,
  /// and 0 < window_lo < window_hi.
  SellmeierCoefficients(std::array<double, 3> b, std::array<double, 3> c_um2, double window_lo_um,
                        double window_hi_um, std::string name = "custom");

  const std::array<double, 3>& b() const { return b_; }
  const std::array<double, 3>& c_um2() const { return c_; }
  double window_lo_um() const { return lo_; }
  double window_hi_um() const { return hi_; }
  const std::string& name() const { return name_; }

  bool in_window(double lambda_um) const { return lambda_um >= lo_ && lambda_um <= hi_; }

 private:
  std::array<double, 3> b_;
  std::array<double, 3> c_;
  double lo_;
  double hi_;
  std::string name_;
};

/// Refractive index at `lambda_um`. Throws DomainError outside the
/// transparency window or when the Sellmeier sum is not positive.
double refractive_index(double lambda_um, const SellmeierCoefficients& coeffs);

/// Extended-precision variant used by the dispersion model's finite differences.
long double refractive_index_ld(long double lambda_um, const SellmeierCoefficients& coeffs);

SellmeierCoefficients sellmeier_from_data(const DataFile& file);
SellmeierCoefficients load_sellmeier(const std::filesystem::path& path);

/// Fused silica as shipped in `data/silica_sellmeier.txt`.
SellmeierCoefficients bundled_silica();

}  // namespace bsfwm
