#pragma once

#include "moped/rng.hpp"
#include "moped/types.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace moped {

enum class Margin { Uniform, Pareto2, Gaussian };
enum class CopulaFamily { Gaussian, StudentT };

Margin parse_margin(std::string_view name);
std::string_view to_string(Margin margin) noexcept;
std::string_view to_string(CopulaFamily family) noexcept;

struct SegmentLaw {
    CopulaFamily family = CopulaFamily::StudentT;
    Matrix omega;  ///< correlation matrix, unit diagonal
    double nu = 3.0;

    friend bool operator==(const SegmentLaw&, const SegmentLaw&) = default;
};

struct ScenarioSpec {
    int scenario = 1;                 ///< 1: identity <-> equicorrelated t-copula; 2: t <-> Gaussian copula
    std::size_t n = 5000;
    std::size_t d = 2;
    std::size_t q = 0;                ///< equally spaced changes, unless `change_points` is set
    double rho = 0.6;                 ///< scenario 1 off-diagonal correlation
    std::uint64_t omega_seed = 1;     ///< scenario 2 random correlation matrix
    double nu = 3.0;
    Margin margin = Margin::Pareto2;
    std::vector<std::size_t> change_points;  ///< explicit 1-based locations; overrides q

    void validate() const;
    /// Explicit locations if given, else floor(l n / (q + 1)) for l = 1..q.
    std::vector<std::size_t> resolved_change_points() const;
};

struct SimulatedSeries {
    Matrix values;
    std::vector<std::size_t> change_points;
    std::vector<SegmentLaw> laws;  ///< one per segment
};

double normal_cdf(double z) noexcept;
double normal_quantile(double u);
/// Student-t CDF; closed form for nu = 3.
double student_t_cdf(double x, double nu);
double student_t3_cdf(double x) noexcept;

/// Cholesky factor of a correlation matrix; throws NotPositiveDefinite.
Matrix cholesky_factor(const Matrix& omega);

/// Rows are independent draws on (0,1)^d.
Matrix sample_gaussian_copula(std::size_t m, const Matrix& omega, Rng& rng);
Matrix sample_t_copula(std::size_t m, const Matrix& omega, double nu, Rng& rng);

/// Rescaled Gram matrix of a d x (d + 2) standard normal matrix.
Matrix random_correlation(std::size_t d, std::uint64_t seed);
Matrix equicorrelation(std::size_t d, double rho);

/// Map uniforms to the requested margin.
Matrix apply_margin(const Matrix& uniforms, Margin margin);

/// Segment laws in time order for the spec.
std::vector<SegmentLaw> scenario_laws(const ScenarioSpec& spec);

SimulatedSeries generate_scenario(const ScenarioSpec& spec, std::uint64_t seed);

}  // namespace moped
