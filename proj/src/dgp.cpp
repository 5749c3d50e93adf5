#include "allocbench/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "allocbench/csv_io.hpp"
#include "allocbench/errors.hpp"
#include "allocbench/random.hpp"

namespace allocbench {
namespace {

constexpr double kDaysInFourYears = 1461.0;
constexpr double kReferenceYear = 2016.0;

struct LogNormalDays {
    double mu;
    double sigma;
};

// Ordered by schema position 2..7.
constexpr LogNormalDays kCumulativeDays[] = {
    {5.0, 1.0},  // cumul_ue
    {6.3, 0.9},  // cumul_employed
    {3.5, 1.3},  // cumul_marginal
    {3.0, 1.2},  // cumul_meas
    {4.8, 1.0},  // cumul_benefit
    {2.5, 1.4},  // cumul_train
};

const std::vector<double>& category_probabilities(const std::string& name) {
    static const std::vector<double> gender{0.55, 0.45};
    static const std::vector<double> citizen{0.2, 0.8};
    static const std::vector<double> vocational{0.30, 0.50, 0.12, 0.08};
    static const std::vector<double> school{0.08, 0.35, 0.32, 0.25};
    if (name == "gender") return gender;
    if (name == "germancitizen") return citizen;
    if (name == "voc_education") return vocational;
    if (name == "school") return school;
    throw std::invalid_argument("no category distribution for covariate " + name);
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

int cut_latent(double latent, const std::vector<double>& probabilities) {
    const double u = standard_normal_cdf(latent);
    double cumulative = 0.0;
    for (std::size_t c = 0; c + 1 < probabilities.size(); ++c) {
        cumulative += probabilities[c];
        if (u < cumulative) return static_cast<int>(c);
    }
    return static_cast<int>(probabilities.size() - 1);
}

double sample_mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Indices that were not covered by full chunks join one extra term padded with
// distinct, uniformly chosen other indices.
std::vector<std::vector<std::size_t>> partition_terms(std::size_t d, std::size_t order, Rng& rng) {
    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    std::vector<std::vector<std::size_t>> terms;
    const std::size_t full = d / order;
    for (std::size_t t = 0; t < full; ++t)
        terms.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(t * order),
                           perm.begin() + static_cast<std::ptrdiff_t>((t + 1) * order));

    std::vector<std::size_t> leftover(perm.begin() + static_cast<std::ptrdiff_t>(full * order),
                                      perm.end());
    if (!leftover.empty()) {
        std::vector<std::size_t> others;
        for (std::size_t j = 0; j < d; ++j)
            if (std::find(leftover.begin(), leftover.end(), j) == leftover.end()) others.push_back(j);
        std::shuffle(others.begin(), others.end(), rng);
        const std::size_t pad = order - leftover.size();
        leftover.insert(leftover.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(pad));
        terms.push_back(std::move(leftover));
    }
    return terms;
}

}  // namespace

std::vector<std::string> CovariateSchema::names() const {
    std::vector<std::string> out;
    out.reserve(covariates.size());
    for (const auto& c : covariates) out.push_back(c.name);
    return out;
}

CovariateSchema CovariateSchema::jobseekers() {
    using K = CovariateKind;
    return CovariateSchema{{
        {"yearofbirth", K::numerical, 0},
        {"age", K::numerical, 0},
        {"cumul_ue", K::numerical, 0},
        {"cumul_employed", K::numerical, 0},
        {"cumul_marginal", K::numerical, 0},
        {"cumul_meas", K::numerical, 0},
        {"cumul_benefit", K::numerical, 0},
        {"cumul_train", K::numerical, 0},
        {"income", K::numerical, 0},
        {"gender", K::categorical, 2},
        {"germancitizen", K::categorical, 2},
        {"voc_education", K::categorical, 4},
        {"school", K::categorical, 4},
    }};
}

void CovariateSchema::validate() const {
    if (covariates.size() != kJobseekerCovariates)
        throw std::invalid_argument("schema must have 13 covariates, got " +
                                    std::to_string(covariates.size()));
    std::size_t categorical = 0;
    for (const auto& c : covariates) {
        if (c.kind == CovariateKind::categorical) {
            ++categorical;
            if (c.category_count < 2)
                throw std::invalid_argument("categorical covariate " + c.name +
                                            " needs at least 2 categories");
        }
    }
    if (categorical != 4)
        throw std::invalid_argument("schema must have 4 categorical covariates, got " +
                                    std::to_string(categorical));
}

CovariateMatrix CovariateMatrix::select_rows(std::span<const std::size_t> indices) const {
    return CovariateMatrix{values.select_rows(indices), names, standardized, stats};
}

std::vector<double> default_test_drift() {
    std::vector<double> drift(kJobseekerCovariates, 0.0);
    drift[1] = 3.0;    // age
    drift[2] = -60.0;  // cumul_ue
    drift[8] = 6.0;    // income
    drift[10] = -0.5;  // germancitizen (latent)
    return drift;
}

CovariateMatrix generate_covariates(std::size_t n, const CovariateSchema& schema,
                                    std::span<const double> drift, std::uint64_t seed) {
    schema.validate();
    const std::size_t d = schema.size();
    if (n == 0) throw std::invalid_argument("generate_covariates: n must be >= 1");
    if (drift.size() != d)
        throw std::invalid_argument("generate_covariates: drift has length " +
                                    std::to_string(drift.size()) + ", expected " + std::to_string(d));
    const auto expected = CovariateSchema::jobseekers();
    for (std::size_t j = 0; j < d; ++j) {
        if (schema.covariates[j].name != expected.covariates[j].name)
            throw std::invalid_argument("generate_covariates: unknown covariate layout at " +
                                        schema.covariates[j].name);
    }

    std::vector<const std::vector<double>*> probs(d, nullptr);
    for (std::size_t j = 0; j < d; ++j)
        if (schema.covariates[j].kind == CovariateKind::categorical) {
            probs[j] = &category_probabilities(schema.covariates[j].name);
            if (static_cast<int>(probs[j]->size()) != schema.covariates[j].category_count)
                throw std::invalid_argument("category count mismatch for " + schema.covariates[j].name);
        }

    Rng rng(seed);
    std::normal_distribution<double> std_normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    CovariateMatrix out{Matrix(n, d), schema.names(), false, std::nullopt};
    for (std::size_t i = 0; i < n; ++i) {
        auto row = out.values.row(i);
        const double age = std::floor(std::clamp(39.0 + 11.0 * std_normal(rng), 16.0, 65.0));
        row[1] = age;
        row[0] = kReferenceYear - age - (coin(rng) ? 1.0 : 0.0);
        for (std::size_t c = 0; c < std::size(kCumulativeDays); ++c) {
            const double z = std_normal(rng);
            row[2 + c] = std::min(kDaysInFourYears,
                                  std::exp(kCumulativeDays[c].mu + kCumulativeDays[c].sigma * z));
        }
        row[8] = std::exp(3.9 + 0.5 * std_normal(rng));
        for (std::size_t j = 9; j < d; ++j) row[j] = cut_latent(std_normal(rng) + drift[j], *probs[j]);
        for (std::size_t j = 0; j < 9; ++j) row[j] += drift[j];
    }
    return out;
}

CovariateMatrix standardize(const CovariateMatrix& x, const std::optional<ColumnStats>& stats) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    auto column_name = [&](std::size_t j) {
        return j < x.names.size() ? x.names[j] : "x_" + std::to_string(j);
    };

    ColumnStats used;
    if (stats) {
        if (stats->mean.size() != d || stats->sd.size() != d)
            throw std::invalid_argument("standardize: stats dimension mismatch");
        for (std::size_t j = 0; j < d; ++j)
            if (!(stats->sd[j] > 0.0)) throw DegenerateColumnError(j, column_name(j));
        used = *stats;
    } else {
        if (n < 2) throw std::invalid_argument("standardize: need at least 2 rows to estimate stats");
        used.mean.assign(d, 0.0);
        used.sd.assign(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
            const auto col = x.values.column(j);
            const double mean = sample_mean(col);
            double ss = 0.0;
            for (double v : col) ss += (v - mean) * (v - mean);
            const double sd = std::sqrt(ss / static_cast<double>(n - 1));
            if (!(sd > 0.0)) throw DegenerateColumnError(j, column_name(j));
            used.mean[j] = mean;
            used.sd[j] = sd;
        }
    }

    CovariateMatrix out{Matrix(n, d), x.names, true, used};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            out.values(i, j) = (x.values(i, j) - used.mean[j]) / used.sd[j];
    return out;
}

DGPCoefficients sample_coefficients(std::size_t d, std::uint64_t seed, double noise_sd) {
    if (d < 3) throw std::invalid_argument("sample_coefficients: need d >= 3");
    if (!(noise_sd > 0.0)) throw std::invalid_argument("sample_coefficients: noise_sd must be > 0");

    Rng rng(seed);
    std::bernoulli_distribution bern(0.3);
    std::normal_distribution<double> std_normal(0.0, 1.0);

    DGPCoefficients c;
    c.noise_sd = noise_sd;
    c.intercept = std_normal(rng);
    c.main_effects.resize(d);
    c.effect_modifiers.resize(d);
    for (auto& b : c.main_effects) b = bern(rng) ? 1.0 : 0.0;
    for (auto& g : c.effect_modifiers) g = bern(rng) ? 1.0 : 0.0;

    for (const auto& t : partition_terms(d, 2, rng)) c.pair_terms.push_back({t[0], t[1], std_normal(rng)});
    for (const auto& t : partition_terms(d, 3, rng))
        c.triple_terms.push_back({t[0], t[1], t[2], std_normal(rng)});
    return c;
}

double treatment_propensity(const DGPCoefficients& coeffs, std::span<const double> x) {
    double index = 0.0;
    for (std::size_t j = 0; j < coeffs.main_effects.size(); ++j) index += coeffs.main_effects[j] * x[j];
    return 1.0 / (1.0 + std::exp(-index));
}

double control_mean(const DGPCoefficients& coeffs, std::span<const double> x) {
    double y = coeffs.intercept;
    for (std::size_t j = 0; j < coeffs.main_effects.size(); ++j) y += coeffs.main_effects[j] * x[j];
    for (const auto& p : coeffs.pair_terms) y += p.coefficient * x[p.j] * x[p.k];
    for (const auto& t : coeffs.triple_terms) y += t.coefficient * x[t.j] * x[t.k] * x[t.l];
    return y;
}

double true_effect(const DGPCoefficients& coeffs, std::span<const double> x) {
    double tau = 0.0;
    for (std::size_t j = 0; j < coeffs.effect_modifiers.size(); ++j) tau += coeffs.effect_modifiers[j] * x[j];
    return tau;
}

PotentialOutcomes simulate_outcomes(const DGPCoefficients& coeffs, const CovariateMatrix& x,
                                    std::uint64_t seed) {
    if (!x.standardized) throw ContractError("simulate_outcomes: covariates must be standardized");
    if (x.cols() != coeffs.dimension())
        throw std::invalid_argument("simulate_outcomes: covariate dimension mismatch");

    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, coeffs.noise_sd);
    const std::size_t n = x.rows();
    PotentialOutcomes out;
    out.y0.resize(n);
    out.y1.resize(n);
    out.tau_true.resize(n);
    out.noise.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = x.values.row(i);
        out.noise[i] = noise(rng);
        out.tau_true[i] = true_effect(coeffs, row);
        out.y0[i] = control_mean(coeffs, row) + out.noise[i];
        out.y1[i] = out.y0[i] + out.tau_true[i];
    }
    return out;
}

TreatmentDraw assign_treatment(std::span<const double> propensity, std::span<const double> y0,
                               std::span<const double> y1, std::uint64_t seed) {
    if (y0.size() != propensity.size() || y1.size() != propensity.size())
        throw std::invalid_argument("assign_treatment: length mismatch");
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    TreatmentDraw out;
    out.treatment.resize(propensity.size());
    out.observed.resize(propensity.size());
    for (std::size_t i = 0; i < propensity.size(); ++i) {
        out.treatment[i] = unif(rng) < propensity[i] ? 1 : 0;
        out.observed[i] = out.treatment[i] == 1 ? y1[i] : y0[i];
    }
    return out;
}

std::vector<double> simulate_costs(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("simulate_costs: n must be >= 1");
    Rng rng(seed);
    std::lognormal_distribution<double> cost(-0.5, 1.0);
    std::vector<double> out(n);
    for (auto& c : out) c = cost(rng);
    return out;
}

PopulationSample PopulationSample::select_rows(std::span<const std::size_t> indices) const {
    auto gather = [&](const auto& v) {
        std::remove_cvref_t<decltype(v)> out;
        out.reserve(indices.size());
        for (std::size_t i : indices) out.push_back(v.at(i));
        return out;
    };
    return PopulationSample{x.select_rows(indices), gather(treatment), gather(y),     gather(y0),
                            gather(y1),           gather(tau_true),  gather(costs), gather(propensity)};
}

PopulationSample simulate_population(const DGPCoefficients& coeffs, const CovariateMatrix& x,
                                     std::uint64_t seed) {
    auto outcomes = simulate_outcomes(coeffs, x, derive_seed(seed, {seed_tag("outcomes")}));
    std::vector<double> propensity(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) propensity[i] = treatment_propensity(coeffs, x.values.row(i));
    auto draw = assign_treatment(propensity, outcomes.y0, outcomes.y1,
                                 derive_seed(seed, {seed_tag("treatment")}));
    PopulationSample s;
    s.x = x;
    s.treatment = std::move(draw.treatment);
    s.y = std::move(draw.observed);
    s.y0 = std::move(outcomes.y0);
    s.y1 = std::move(outcomes.y1);
    s.tau_true = std::move(outcomes.tau_true);
    s.costs = simulate_costs(x.rows(), derive_seed(seed, {seed_tag("costs")}));
    s.propensity = std::move(propensity);
    return s;
}

void write_population_csv(std::ostream& out, const PopulationSample& sample) {
    const std::size_t d = sample.x.cols();
    out << "unit_id";
    for (std::size_t j = 0; j < d; ++j) out << ",x_" << j;
    out << ",T,Y,Y0,Y1,tau_true,cost,propensity\n";
    for (std::size_t i = 0; i < sample.size(); ++i) {
        out << i;
        for (std::size_t j = 0; j < d; ++j) out << ',' << format_exact(sample.x.values(i, j));
        out << ',' << sample.treatment[i] << ',' << format_exact(sample.y[i]) << ','
            << format_exact(sample.y0[i]) << ',' << format_exact(sample.y1[i]) << ','
            << format_exact(sample.tau_true[i]) << ',' << format_exact(sample.costs[i]) << ','
            << format_exact(sample.propensity[i]) << '\n';
    }
}

}  // namespace allocbench
