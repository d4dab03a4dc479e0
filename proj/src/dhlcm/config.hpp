#pragma once

#include <string>

#include "inference.hpp"
#include "simulation.hpp"

namespace dhlcm {

// Parses an experiment config from JSON, rejecting unknown keys, and applies
// scenario defaults (feature-row overrides for the null/alternative rows,
// equal-null rows for the FDR protocol, the two-column block item matrix for
// the method-comparison scenario). Throws ConfigError on any problem.
ExperimentConfig experiment_config_from_json(const std::string& text);

// Canonical serialization of a resolved config (echoed into report files).
std::string experiment_config_to_json(const ExperimentConfig& config);

ModelFamily family_from_name(const std::string& name, int trials);
SpectralMethod method_from_name(const std::string& name);
Normalization normalization_from_name(const std::string& name);
TestRegime regime_from_name(const std::string& name);

}  // namespace dhlcm
