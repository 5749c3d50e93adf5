#pragma once

// Semi-synthetic data generation: a synthetic jobseeker covariate generator,
// random outcome-model coefficients with pairwise and three-way interactions,
// propensity-based treatment assignment and log-normal intervention costs.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "allocbench/matrix.hpp"

namespace allocbench {

enum class CovariateKind { numerical, categorical };

struct CovariateSpec {
    std::string name;
    CovariateKind kind = CovariateKind::numerical;
    int category_count = 0;  ///< >= 2 for categorical, 0 for numerical
};

struct CovariateSchema {
    std::vector<CovariateSpec> covariates;

    std::size_t size() const noexcept { return covariates.size(); }
    std::vector<std::string> names() const;

    /// The 13-covariate jobseeker schema: nine numerical employment and
    /// demographic features followed by gender, germancitizen, voc_education
    /// and school.
    static CovariateSchema jobseekers();

    /// Throws std::invalid_argument unless the schema has 13 covariates, 9
    /// numerical and 4 categorical, each categorical with >= 2 categories.
    void validate() const;
};

/// Per-column location and scale used for z-scoring.
struct ColumnStats {
    std::vector<double> mean;
    std::vector<double> sd;
};

struct CovariateMatrix {
    Matrix values;
    std::vector<std::string> names;
    bool standardized = false;
    std::optional<ColumnStats> stats;  ///< present iff standardized

    std::size_t rows() const noexcept { return values.rows(); }
    std::size_t cols() const noexcept { return values.cols(); }
    CovariateMatrix select_rows(std::span<const std::size_t> indices) const;
};

/// Index of `age` in the jobseeker schema.
inline constexpr std::size_t kAgeColumn = 1;
inline constexpr std::size_t kJobseekerCovariates = 13;

/// Default drift of the later (test) cohort relative to the training cohort,
/// in raw covariate units. Numerical covariates are shifted additively;
/// categorical entries shift the latent normal that is cut into categories.
std::vector<double> default_test_drift();

/// Draws n rows of synthetic covariates.
///
/// Numerical columns (raw units):
///   age            floor of N(39, 11^2) clamped to [16, 65]
///   yearofbirth    2016 - age - Bernoulli(0.5)
///   cumul_*        min(1461, LogNormal(mu, sigma)) days, per-column parameters
///   income         LogNormal(3.9, 0.5) daily wage
/// Categorical columns are integer codes 0..K-1 obtained by cutting a latent
/// N(0, 1) at the quantiles of fixed category probabilities.
///
/// `drift` has one entry per covariate and is added to numerical values and to
/// the latent variable of categorical ones. Deterministic given `seed`.
CovariateMatrix generate_covariates(std::size_t n, const CovariateSchema& schema,
                                    std::span<const double> drift, std::uint64_t seed);

/// Z-scores each column with the sample standard deviation (n - 1
/// denominator). Without `stats` the statistics are computed from `x`, which
/// needs at least two rows and no constant column; with `stats` (test time)
/// the supplied training statistics are applied.
CovariateMatrix standardize(const CovariateMatrix& x,
                            const std::optional<ColumnStats>& stats = std::nullopt);

struct PairTerm {
    std::size_t j, k;
    double coefficient;
};

struct TripleTerm {
    std::size_t j, k, l;
    double coefficient;
};

struct DGPCoefficients {
    double intercept = 0.0;
    std::vector<double> main_effects;      ///< beta_j in {0, 1}
    std::vector<PairTerm> pair_terms;
    std::vector<TripleTerm> triple_terms;
    std::vector<double> effect_modifiers;  ///< gamma_j in {0, 1}
    double noise_sd = 0.1;

    std::size_t dimension() const noexcept { return main_effects.size(); }
};

/// Samples main effects and effect modifiers as Bernoulli(0.3), an intercept
/// from N(0, 1) and one random pair partition and one random triple partition
/// of the covariate indices with N(0, 1) coefficients.
///
/// Leftover indices when d is not divisible by 2 (or 3) form one extra term
/// padded with uniformly chosen distinct other indices, so every index is in
/// at least one pair and one triple term.
DGPCoefficients sample_coefficients(std::size_t d, std::uint64_t seed, double noise_sd = 0.1);

/// Logistic of the main-effect index, the treatment assignment probability.
double treatment_propensity(const DGPCoefficients& coeffs, std::span<const double> x);

/// Noise-free control outcome c + main + pair + triple terms for one row.
double control_mean(const DGPCoefficients& coeffs, std::span<const double> x);

/// sum_j gamma_j x_j, the true treatment effect of one row.
double true_effect(const DGPCoefficients& coeffs, std::span<const double> x);

struct PotentialOutcomes {
    std::vector<double> y0;
    std::vector<double> y1;
    std::vector<double> tau_true;
    std::vector<double> noise;
};

/// Y0 = control_mean + eps, Y1 = Y0 + tau_true, eps ~ N(0, noise_sd^2).
/// Throws ContractError when `x` is not standardized.
PotentialOutcomes simulate_outcomes(const DGPCoefficients& coeffs, const CovariateMatrix& x,
                                    std::uint64_t seed);

struct TreatmentDraw {
    std::vector<int> treatment;
    std::vector<double> observed;
};

TreatmentDraw assign_treatment(std::span<const double> propensity, std::span<const double> y0,
                               std::span<const double> y1, std::uint64_t seed);

/// c_i = exp(z_i), z_i ~ N(-0.5, 1), so the population mean cost is 1.
std::vector<double> simulate_costs(std::size_t n, std::uint64_t seed);

struct PopulationSample {
    CovariateMatrix x;
    std::vector<int> treatment;
    std::vector<double> y;
    std::vector<double> y0;
    std::vector<double> y1;
    std::vector<double> tau_true;
    std::vector<double> costs;
    std::vector<double> propensity;

    std::size_t size() const noexcept { return treatment.size(); }
    /// Rows gathered with every per-unit field; indices may repeat.
    PopulationSample select_rows(std::span<const std::size_t> indices) const;
};

/// Outcomes, treatment and costs for standardized covariates, each drawn from
/// its own stream derived from `seed`.
PopulationSample simulate_population(const DGPCoefficients& coeffs, const CovariateMatrix& x,
                                     std::uint64_t seed);

/// CSV with header unit_id,x_0..x_{d-1},T,Y,Y0,Y1,tau_true,cost,propensity.
void write_population_csv(std::ostream& out, const PopulationSample& sample);

}  // namespace allocbench
