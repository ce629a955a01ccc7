#include "dimaudit/synth.hpp"

#include <fstream>
#include <stdexcept>

#include "dimaudit/csv.hpp"
#include "dimaudit/rng.hpp"

namespace dimaudit {

PlantedSpec block_factor_spec(std::size_t n, std::size_t p, std::size_t m, double strength,
                              double noise_sd, std::uint64_t seed) {
    if (m == 0 || m >= p) throw std::invalid_argument("block_factor_spec: need 0 < m < p");
    PlantedSpec spec;
    spec.n = n;
    spec.p = p;
    spec.noise_sd = noise_sd;
    spec.seed = seed;
    spec.loadings_true = Matrix(p, m);
    for (std::size_t j = 0; j < p; ++j) {
        const std::size_t factor = std::min(j * m / p, m - 1);
        spec.loadings_true(j, factor) = strength;
    }
    spec.target_weights.assign(m, 1.0);
    return spec;
}

PlantedData generate_planted(const PlantedSpec& spec) {
    const std::size_t n = spec.n;
    const std::size_t p = spec.p;
    const std::size_t m = spec.loadings_true.cols();
    if (spec.loadings_true.rows() != p)
        throw std::invalid_argument("generate_planted: loadings_true must be p x m");
    if (m == 0 || m >= p) throw std::invalid_argument("generate_planted: need 0 < m < p");
    if (!(spec.noise_sd > 0.0)) throw std::invalid_argument("generate_planted: noise_sd must be > 0");
    if (spec.target_weights.size() != m)
        throw std::invalid_argument("generate_planted: target_weights length must equal m");

    Rng rng(spec.seed);
    PlantedData out;
    out.factor_values = Matrix(n, m);
    out.matrix.values = Matrix(n, p);
    out.matrix.attribute_names.reserve(p);
    for (std::size_t j = 0; j < p; ++j)
        out.matrix.attribute_names.push_back("a" + std::to_string(j + 1));
    out.matrix.player_ids.reserve(n);
    out.matrix.overall.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        auto f = out.factor_values.row(i);
        for (std::size_t k = 0; k < m; ++k) f[k] = rng.next_gaussian();
        auto row = out.matrix.values.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            double value = spec.noise_sd * rng.next_gaussian();
            for (std::size_t k = 0; k < m; ++k) value += spec.loadings_true(j, k) * f[k];
            row[j] = spec.attr_offset + spec.attr_scale * value;
        }
        double target = spec.target_noise_sd * rng.next_gaussian();
        for (std::size_t k = 0; k < m; ++k) target += spec.target_weights[k] * f[k];
        out.matrix.overall.push_back(spec.target_offset + spec.target_scale * target);
        out.matrix.player_ids.push_back("p" + std::to_string(i + 1));
    }
    return out;
}

Matrix population_covariance(const PlantedSpec& spec) {
    const std::size_t p = spec.p;
    const std::size_t m = spec.loadings_true.cols();
    Matrix cov(p, p);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a; b < p; ++b) {
            double value = 0.0;
            for (std::size_t k = 0; k < m; ++k)
                value += spec.loadings_true(a, k) * spec.loadings_true(b, k);
            if (a == b) value += spec.noise_sd * spec.noise_sd;
            cov(a, b) = value;
            cov(b, a) = value;
        }
    }
    return cov;
}

void write_planted_csv(const PlantedData& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_planted_csv: cannot open " + path);
    out << "player_id,overall_rating";
    for (const auto& name : data.matrix.attribute_names) out << ',' << csv::quote_field(name);
    out << '\n';
    for (std::size_t i = 0; i < data.matrix.values.rows(); ++i) {
        out << data.matrix.player_ids[i] << ',' << csv::format_double(data.matrix.overall[i]);
        for (double v : data.matrix.values.row(i)) out << ',' << csv::format_double(v);
        out << '\n';
    }
}

TableSchema planted_schema(const std::vector<std::string>& attribute_names) {
    TableSchema schema;
    schema.id_column = "player_id";
    schema.rating_column = "overall_rating";
    schema.attribute_columns = attribute_names;
    return schema;
}

} // namespace dimaudit
