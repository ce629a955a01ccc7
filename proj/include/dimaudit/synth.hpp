#pragma once

// Planted-factor synthetic data: rows = L f + noise with known loadings, plus
// a synthetic overall rating built from the factors. Ground truth for
// validating every diagnostic before it touches real data.

#include <cstdint>

#include "dimaudit/table.hpp"

namespace dimaudit {

struct PlantedSpec {
    std::size_t n = 1000;
    std::size_t p = 28;
    Matrix loadings_true;               // p x m, columns linearly independent
    double noise_sd = 1.0;              // attribute noise, > 0
    std::vector<double> target_weights; // length m, how factors combine into the rating
    double target_noise_sd = 0.5;
    std::uint64_t seed = 0;
    // Affine rescale into a 0-100-like range; recorded so standardization
    // removes it exactly. Set scales to 1 / offsets to 0 for raw output.
    double attr_scale = 8.0;
    double attr_offset = 60.0;
    double target_scale = 6.0;
    double target_offset = 65.0;
};

struct PlantedData {
    AttributeMatrix matrix;
    Matrix factor_values; // n x m, the true factors behind each row
};

// Builds a spec with m well-separated block factors: factor j loads `strength`
// on its own block of p/m attributes and 0 elsewhere.
PlantedSpec block_factor_spec(std::size_t n, std::size_t p, std::size_t m, double strength,
                              double noise_sd, std::uint64_t seed);

PlantedData generate_planted(const PlantedSpec& spec);

// Population covariance implied by the spec before rescale: L L' + noise_sd^2 I.
Matrix population_covariance(const PlantedSpec& spec);

// Writes planted data in the same CSV layout load_table consumes
// (player_id, overall_rating, then attribute columns a1..ap).
void write_planted_csv(const PlantedData& data, const std::string& path);

// Schema matching write_planted_csv output.
TableSchema planted_schema(const std::vector<std::string>& attribute_names);

} // namespace dimaudit
