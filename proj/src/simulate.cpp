#include "moped/simulate.hpp"

#include "moped/error.hpp"
#include "moped/margins.hpp"

#include <Eigen/Cholesky>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace moped {

namespace {

constexpr double kUniformFloor = 0x1p-53;
constexpr double kUniformCeil = 1.0 - 0x1p-53;

// Keeps copula draws strictly inside (0,1) even when the CDF rounds to 0 or 1.
double clamp_unit(double u) noexcept {
    return std::clamp(u, kUniformFloor, kUniformCeil);
}

Matrix standard_normals(std::size_t rows, std::size_t cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
            z(r, c) = normal(rng);
        }
    }
    return z;
}

}  // namespace

Margin parse_margin(std::string_view name) {
    if (name == "uniform") return Margin::Uniform;
    if (name == "pareto2" || name == "pareto") return Margin::Pareto2;
    if (name == "gaussian" || name == "normal") return Margin::Gaussian;
    throw Error(ErrorCode::InvalidSpec, "unknown margin '" + std::string(name) + "'");
}

std::string_view to_string(Margin margin) noexcept {
    switch (margin) {
        case Margin::Uniform: return "uniform";
        case Margin::Pareto2: return "pareto2";
        case Margin::Gaussian: return "gaussian";
    }
    return "unknown";
}

std::string_view to_string(CopulaFamily family) noexcept {
    return family == CopulaFamily::Gaussian ? "gaussian" : "student_t";
}

double normal_cdf(double z) noexcept {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double u) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), u);
}

double student_t3_cdf(double x) noexcept {
    const double s = std::sqrt(3.0);
    return 0.5 + (x / (s * (1.0 + x * x / 3.0)) + std::atan(x / s)) / std::numbers::pi;
}

double student_t_cdf(double x, double nu) {
    if (nu == 3.0) {
        return student_t3_cdf(x);
    }
    return boost::math::cdf(boost::math::students_t_distribution<double>(nu), x);
}

Matrix cholesky_factor(const Matrix& omega) {
    if (omega.rows() != omega.cols() || omega.rows() == 0) {
        throw Error(ErrorCode::NotPositiveDefinite, "correlation matrix must be square and non-empty");
    }
    Eigen::LLT<Matrix> llt(omega);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::NotPositiveDefinite, "correlation matrix is not positive definite");
    }
    return llt.matrixL();
}

Matrix sample_gaussian_copula(std::size_t m, const Matrix& omega, Rng& rng) {
    const Matrix lower = cholesky_factor(omega);
    Matrix z = standard_normals(m, static_cast<std::size_t>(omega.rows()), rng) * lower.transpose();
    return z.unaryExpr([](double v) { return clamp_unit(normal_cdf(v)); });
}

Matrix sample_t_copula(std::size_t m, const Matrix& omega, double nu, Rng& rng) {
    if (!(nu > 0.0)) {
        throw Error(ErrorCode::InvalidSpec, "degrees of freedom must be positive");
    }
    const Matrix lower = cholesky_factor(omega);
    const auto d = static_cast<std::size_t>(omega.rows());
    std::chi_squared_distribution<double> chi2(nu);
    Matrix u(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
        const Matrix zrow = standard_normals(1, d, rng) * lower.transpose();
        const double scale = 1.0 / std::sqrt(chi2(rng) / nu);
        for (Eigen::Index c = 0; c < u.cols(); ++c) {
            u(r, c) = clamp_unit(student_t_cdf(zrow(0, c) * scale, nu));
        }
    }
    return u;
}

Matrix equicorrelation(std::size_t d, double rho) {
    const auto n = static_cast<Eigen::Index>(d);
    Matrix omega = Matrix::Constant(n, n, rho);
    omega.diagonal().setOnes();
    return omega;
}

Matrix random_correlation(std::size_t d, std::uint64_t seed) {
    if (d < 2) {
        throw Error(ErrorCode::InvalidSpec, "random correlation needs d >= 2");
    }
    for (std::uint64_t attempt = 0;; ++attempt) {
        auto rng = make_rng(seed, attempt);
        const Matrix a = standard_normals(d, d + 2, rng);
        const Matrix gram = a * a.transpose();
        const Vector inv_sd = gram.diagonal().cwiseSqrt().cwiseInverse();
        Matrix omega = inv_sd.asDiagonal() * gram * inv_sd.asDiagonal();
        omega = 0.5 * (omega + omega.transpose()).eval();
        omega.diagonal().setOnes();
        Eigen::LLT<Matrix> llt(omega);
        if (llt.info() == Eigen::Success) {
            return omega;
        }
    }
}

Matrix apply_margin(const Matrix& uniforms, Margin margin) {
    switch (margin) {
        case Margin::Uniform:
            return uniforms;
        case Margin::Pareto2:
            return uniforms.unaryExpr([](double u) { return pareto2_quantile(u); });
        case Margin::Gaussian:
            return uniforms.unaryExpr([](double u) { return normal_quantile(u); });
    }
    return uniforms;
}

void ScenarioSpec::validate() const {
    if (scenario != 1 && scenario != 2) {
        throw Error(ErrorCode::InvalidSpec, "scenario must be 1 or 2");
    }
    if (d < 2) {
        throw Error(ErrorCode::InvalidSpec, "dimension must be at least 2");
    }
    if (!(nu > 0.0)) {
        throw Error(ErrorCode::InvalidSpec, "degrees of freedom must be positive");
    }
    if (scenario == 1) {
        const double lower = -1.0 / static_cast<double>(d - 1);
        if (!(rho > lower && rho < 1.0)) {
            throw Error(ErrorCode::InvalidSpec, "rho outside the positive-definite range of an equicorrelation matrix");
        }
    }
    const auto taus = resolved_change_points();
    if (n < 2 * (taus.size() + 1)) {
        throw Error(ErrorCode::InvalidSpec, "series too short for the requested number of segments");
    }
    std::size_t prev = 0;
    for (const auto tau : taus) {
        if (tau < prev + 2 || tau + 2 > n) {
            throw Error(ErrorCode::InvalidSpec, "change points must be increasing with segments of length >= 2");
        }
        prev = tau;
    }
}

std::vector<std::size_t> ScenarioSpec::resolved_change_points() const {
    if (!change_points.empty()) {
        return change_points;
    }
    std::vector<std::size_t> taus;
    for (std::size_t l = 1; l <= q; ++l) {
        taus.push_back(l * n / (q + 1));
    }
    return taus;
}

std::vector<SegmentLaw> scenario_laws(const ScenarioSpec& spec) {
    const std::size_t segments = spec.resolved_change_points().size() + 1;
    std::vector<SegmentLaw> laws;
    laws.reserve(segments);
    if (spec.scenario == 1) {
        const SegmentLaw independent{CopulaFamily::StudentT, Matrix::Identity(static_cast<Eigen::Index>(spec.d),
                                                                              static_cast<Eigen::Index>(spec.d)),
                                     spec.nu};
        const SegmentLaw correlated{CopulaFamily::StudentT, equicorrelation(spec.d, spec.rho), spec.nu};
        if (segments == 1) {
            laws.push_back(correlated);
        } else {
            for (std::size_t l = 0; l < segments; ++l) {
                laws.push_back(l % 2 == 0 ? independent : correlated);
            }
        }
    } else {
        const Matrix omega = random_correlation(spec.d, spec.omega_seed);
        for (std::size_t l = 0; l < segments; ++l) {
            laws.push_back(SegmentLaw{l % 2 == 0 ? CopulaFamily::StudentT : CopulaFamily::Gaussian, omega, spec.nu});
        }
    }
    return laws;
}

SimulatedSeries generate_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
    spec.validate();
    SimulatedSeries out;
    out.change_points = spec.resolved_change_points();
    out.laws = scenario_laws(spec);

    auto rng = make_rng(seed, 0);
    Matrix uniforms(static_cast<Eigen::Index>(spec.n), static_cast<Eigen::Index>(spec.d));
    std::size_t begin = 0;
    for (std::size_t l = 0; l < out.laws.size(); ++l) {
        const std::size_t end = l < out.change_points.size() ? out.change_points[l] : spec.n;
        const auto& law = out.laws[l];
        const Matrix block = law.family == CopulaFamily::StudentT
                                 ? sample_t_copula(end - begin, law.omega, law.nu, rng)
                                 : sample_gaussian_copula(end - begin, law.omega, rng);
        uniforms.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin)) = block;
        begin = end;
    }
    out.values = apply_margin(uniforms, spec.margin);
    return out;
}

}  // namespace moped
