#pragma once

#include <optional>
#include <string>

#include "flqr/estimator.hpp"
#include "flqr/inference.hpp"
#include "flqr/spectrum.hpp"

namespace flqr {

/// Library version written into every JSON artifact.
inline constexpr const char* kVersion = "flqr 1.0.0 (spec rev 1)";

/// A fit together with the eigen-system built from it, so inference needs
/// nothing but the fit file.
struct FitBundle {
  FitResult fit;
  std::optional<EigenSystem> eigensystem;
  std::optional<InferenceDiagnostics> diagnostics;
};

std::string fit_to_json(const FitBundle& bundle);
/// ParseError on malformed input or missing fields.
FitBundle fit_from_json(const std::string& text);

/// Columns t, beta_hat.
std::string beta_csv(const FitResult& fit);
/// One row per nu: nu, rho, then phi_nu at every grid point (header lists the grid).
std::string eigensystem_csv(const EigenSystem& es);

}  // namespace flqr
