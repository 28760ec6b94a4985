#include <doctest.h>

#include <cmath>
#include <string>

#include "bsfwm/data_file.hpp"
#include "bsfwm/errors.hpp"
#include "bsfwm/material.hpp"

using namespace bsfwm;

TEST_CASE("vacuum limit: zero oscillator strengths give unit index") {
  const SellmeierCoefficients vacuum({0.0, 0.0, 0.0}, {0.01, 0.02, 100.0}, 0.21, 6.7);
  for (double l : {0.3, 1.0, 1.55, 5.0}) CHECK(refractive_index(l, vacuum) == 1.0);
}

TEST_CASE("bundled silica at 1.55 um") {
  const auto silica = bundled_silica();
  // Regression reference from direct evaluation of the bundled coefficients.
  CHECK(refractive_index(1.55, silica) == doctest::Approx(1.4440236217).epsilon(1e-10));
  CHECK(refractive_index(1.55, silica) == doctest::Approx(1.444).epsilon(1e-3));
}

TEST_CASE("out-of-window wavelength is a domain error naming the window") {
  const auto silica = bundled_silica();
  try {
    refractive_index(0.05, silica);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("[0.21, 6.7]") != std::string::npos);
  }
  CHECK_THROWS_AS(refractive_index(7.0, silica), DomainError);
}

TEST_CASE("negative radicand is a domain error") {
  // Just above a strong resonance the Sellmeier sum dives below -1.
  const SellmeierCoefficients strong({5.0, 0.0, 0.0}, {0.25, 0.01, 100.0}, 0.1, 6.0);
  CHECK_THROWS_AS(refractive_index(0.49, strong), DomainError);
}

TEST_CASE("coefficient invariants are enforced") {
  CHECK_THROWS_AS(SellmeierCoefficients({-0.1, 0.0, 0.0}, {0.01, 0.02, 100.0}, 0.2, 6.0), ConfigError);
  CHECK_THROWS_AS(SellmeierCoefficients({0.1, 0.0, 0.0}, {0.0, 0.02, 100.0}, 0.2, 6.0), ConfigError);
  CHECK_THROWS_AS(SellmeierCoefficients({0.1, 0.0, 0.0}, {0.02, 0.02, 100.0}, 0.2, 6.0), ConfigError);
  CHECK_THROWS_AS(SellmeierCoefficients({0.1, 0.0, 0.0}, {0.01, 0.02, 100.0}, 6.0, 0.2), ConfigError);
}

TEST_CASE("silica index decreases monotonically over 0.4-1.8 um on a 1 nm grid") {
  const auto silica = bundled_silica();
  double previous = refractive_index(0.4, silica);
  for (int nm = 401; nm <= 1800; ++nm) {
    const double n = refractive_index(nm * 1e-3, silica);
    REQUIRE(n < previous);
    previous = n;
  }
}

TEST_CASE("silica index exceeds one across its window and is continuous") {
  const auto silica = bundled_silica();
  for (double l = silica.window_lo_um(); l <= silica.window_hi_um(); l += 0.01) {
    REQUIRE(refractive_index(l, silica) > 1.0);
  }
  const double n0 = refractive_index(1.0, silica);
  double last_gap = 1.0;
  for (double h = 1e-2; h > 1e-9; h /= 10.0) {
    const double gap = std::abs(refractive_index(1.0 + h, silica) - n0);
    CHECK(gap < last_gap);
    last_gap = gap;
  }
  CHECK(last_gap < 1e-9);
}

TEST_CASE("data file checksum is validated") {
  const std::string body =
      "# provenance\n"
      "format = silica_sellmeier/1\n"
      "b = 0.6961663 0.4079426 0.8974794\n"
      "c_um2 = 0.00467914825849 0.01351206307396 97.934002537921\n"
      "window_um = 0.21 6.7\n";
  const std::string good = body + "checksum = crc32:" + data_file_checksum(body) + "\n";
  const auto coeffs = sellmeier_from_data(DataFile::parse(good));
  CHECK(refractive_index(1.55, coeffs) == doctest::Approx(1.4440236217).epsilon(1e-10));

  std::string tampered = good;
  tampered.replace(tampered.find("0.6961663"), 9, "0.6961664");
  CHECK_THROWS_AS(DataFile::parse(tampered), ConfigError);
  CHECK_THROWS_AS(DataFile::parse(body), ConfigError);
}

TEST_CASE("missing or malformed keys are reported") {
  const std::string body = "format = silica_sellmeier/1\nb = 1 2\n";
  const auto file = DataFile::parse(body + "checksum = crc32:" + data_file_checksum(body) + "\n");
  CHECK_THROWS_AS(file.numbers("b", 3), ConfigError);
  CHECK_THROWS_AS(file.text("c_um2"), ConfigError);
}
