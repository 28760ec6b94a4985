#include "bsfwm/material.hpp"

#include <fmt/format.h>

#include <cmath>

#include "bsfwm/data_file.hpp"
#include "bsfwm/errors.hpp"

namespace bsfwm {

SellmeierCoefficients::SellmeierCoefficients(std::array<double, 3> b, std::array<double, 3> c_um2,
                                             double window_lo_um, double window_hi_um,
                                             std::string name)
    : b_(b), c_(c_um2), lo_(window_lo_um), hi_(window_hi_um), name_(std::move(name)) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(b_[i] >= 0.0)) throw ConfigError(fmt::format("Sellmeier b[{}] = {} is negative", i, b_[i]));
    if (!(c_[i] > 0.0)) throw ConfigError(fmt::format("Sellmeier c[{}] = {} is not positive", i, c_[i]));
    for (std::size_t j = 0; j < i; ++j) {
      if (c_[i] == c_[j]) throw ConfigError("Sellmeier resonances must be distinct");
    }
  }
  if (!(lo_ > 0.0 && lo_ < hi_)) {
    throw ConfigError(fmt::format("Sellmeier window [{}, {}] um is empty", lo_, hi_));
  }
}

long double refractive_index_ld(long double lambda_um, const SellmeierCoefficients& coeffs) {
  const double l = static_cast<double>(lambda_um);
  if (!(l >= coeffs.window_lo_um() * (1.0 - 1e-12) && l <= coeffs.window_hi_um() * (1.0 + 1e-12))) {
    throw DomainError(fmt::format("wavelength {} um outside the {} window [{}, {}] um",
                                  static_cast<double>(lambda_um), coeffs.name(),
                                  coeffs.window_lo_um(), coeffs.window_hi_um()));
  }
  const long double l2 = lambda_um * lambda_um;
  long double n2 = 1.0L;
  for (std::size_t i = 0; i < 3; ++i) {
    const long double denom = l2 - coeffs.c_um2()[i];
    if (denom == 0.0L) throw DomainError("wavelength sits on a Sellmeier resonance");
    n2 += coeffs.b()[i] * l2 / denom;
  }
  if (!(n2 > 0.0L)) {
    throw DomainError(fmt::format("Sellmeier radicand {} is not positive at {} um",
                                  static_cast<double>(n2), static_cast<double>(lambda_um)));
  }
  return std::sqrt(n2);
}

double refractive_index(double lambda_um, const SellmeierCoefficients& coeffs) {
  return static_cast<double>(refractive_index_ld(lambda_um, coeffs));
}

SellmeierCoefficients sellmeier_from_data(const DataFile& file) {
  if (file.text("format") != "silica_sellmeier/1") {
    throw ConfigError(fmt::format("{}: unsupported format '{}'", file.source(), file.text("format")));
  }
  const auto b = file.numbers("b", 3);
  const auto c = file.numbers("c_um2", 3);
  const auto w = file.numbers("window_um", 2);
  const std::string name = file.contains("name") ? file.text("name") : "glass";
  return {{b[0], b[1], b[2]}, {c[0], c[1], c[2]}, w[0], w[1], name};
}

SellmeierCoefficients load_sellmeier(const std::filesystem::path& path) {
  return sellmeier_from_data(DataFile::load(path));
}

SellmeierCoefficients bundled_silica() {
  return load_sellmeier(bundled_data_dir() / "silica_sellmeier.txt");
}

}  // namespace bsfwm
