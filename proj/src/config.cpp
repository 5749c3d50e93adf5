#include "allocbench/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "allocbench/csv_io.hpp"
#include "allocbench/dgp.hpp"
#include "allocbench/errors.hpp"

namespace allocbench {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::uint64_t to_u64(const std::string& key, std::string_view text) {
    const std::string s(trim(text));
    if (s.empty() || s.front() == '-') throw ConfigError(key, "expected a nonnegative integer, got '" + s + "'");
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw ConfigError(key, "expected a nonnegative integer, got '" + s + "'");
    return v;
}

long long to_int(const std::string& key, std::string_view text) {
    const std::string s(trim(text));
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
        throw ConfigError(key, "expected an integer, got '" + s + "'");
    return v;
}

double to_real(const std::string& key, std::string_view text) {
    try {
        const double v = parse_double(text);
        if (!std::isfinite(v)) throw std::invalid_argument("not finite");
        return v;
    } catch (const std::invalid_argument&) {
        throw ConfigError(key, "expected a number, got '" + std::string(trim(text)) + "'");
    }
}

bool to_bool(const std::string& key, std::string_view text) {
    const auto s = trim(text);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(key, "expected true or false, got '" + std::string(s) + "'");
}

template <typename T, typename Parse>
std::vector<T> to_list(const std::string& key, std::string_view text, Parse parse) {
    std::vector<T> out;
    if (trim(text).empty()) return out;
    for (const auto& field : split_csv_line(text)) out.push_back(parse(key, field));
    return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::ostringstream out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ", ";
        if constexpr (std::is_floating_point_v<T>) out << format_exact(values[i]);
        else out << values[i];
    }
    return out.str();
}

std::size_t to_count(const std::string& key, std::string_view text) {
    return static_cast<std::size_t>(to_u64(key, text));
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, std::string_view)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"master_seed", [](auto& c, auto& k, auto v) { c.master_seed = to_u64(k, v); }},
        {"dgp_seed", [](auto& c, auto& k, auto v) { c.dgp_seed = to_u64(k, v); }},
        {"n_train", [](auto& c, auto& k, auto v) { c.n_train = to_count(k, v); }},
        {"n_limited", [](auto& c, auto& k, auto v) { c.n_limited = to_count(k, v); }},
        {"n_test", [](auto& c, auto& k, auto v) { c.n_test = to_count(k, v); }},
        {"n_sims", [](auto& c, auto& k, auto v) { c.n_sims = to_count(k, v); }},
        {"shift_q", [](auto& c, auto& k, auto v) { c.shift_q = static_cast<int>(to_int(k, v)); }},
        {"shift_m", [](auto& c, auto& k, auto v) { c.shift_m = to_count(k, v); }},
        {"signed_weights", [](auto& c, auto& k, auto v) { c.signed_weights = to_bool(k, v); }},
        {"budget_fractions", [](auto& c, auto& k, auto v) { c.budget_fractions = to_list<double>(k, v, to_real); }},
        {"drift", [](auto& c, auto& k, auto v) { c.drift = to_list<double>(k, v, to_real); }},
        {"noise_sd", [](auto& c, auto& k, auto v) { c.noise_sd = to_real(k, v); }},
        {"cv_folds", [](auto& c, auto& k, auto v) { c.cv_folds = static_cast<int>(to_int(k, v)); }},
        {"gb_learning_rates", [](auto& c, auto& k, auto v) { c.gb_learning_rates = to_list<double>(k, v, to_real); }},
        {"gb_max_depths",
         [](auto& c, auto& k, auto v) {
             c.gb_max_depths = to_list<int>(k, v, [](auto& kk, auto f) { return static_cast<int>(to_int(kk, f)); });
         }},
        {"gb_n_estimators",
         [](auto& c, auto& k, auto v) {
             c.gb_n_estimators = to_list<int>(k, v, [](auto& kk, auto f) { return static_cast<int>(to_int(kk, f)); });
         }},
        {"logistic_c", [](auto& c, auto& k, auto v) { c.logistic_c = to_list<double>(k, v, to_real); }},
        {"propensity_clip", [](auto& c, auto& k, auto v) { c.propensity_clip = to_real(k, v); }},
        {"rf_trees", [](auto& c, auto& k, auto v) { c.rf_trees = static_cast<int>(to_int(k, v)); }},
        {"rf_max_depth", [](auto& c, auto& k, auto v) { c.rf_max_depth = static_cast<int>(to_int(k, v)); }},
        {"domain_p_min", [](auto& c, auto& k, auto v) { c.domain_p_min = to_real(k, v); }},
        {"knapsack_node_limit", [](auto& c, auto& k, auto v) { c.knapsack_node_limit = to_u64(k, v); }},
        {"oracle_model", [](auto& c, auto& k, auto v) { c.oracle_model = to_bool(k, v); }},
        {"output_dir", [](auto& c, auto&, auto v) { c.output_dir = std::string(trim(v)); }},
        {"threads", [](auto& c, auto& k, auto v) { c.threads = static_cast<int>(to_int(k, v)); }},
    };
    return table;
}

}  // namespace

ExperimentConfig::ExperimentConfig() : drift(default_test_drift()) {
    for (int i = 1; i <= 19; ++i) budget_fractions.push_back(i / 20.0);
}

std::vector<BoostingParams> ExperimentConfig::boosting_grid() const {
    std::vector<BoostingParams> grid;
    for (double lr : gb_learning_rates)
        for (int depth : gb_max_depths)
            for (int n : gb_n_estimators) grid.push_back({lr, depth, n});
    return grid;
}

void ExperimentConfig::validate() const {
    auto require = [](bool ok, const char* field, const std::string& message) {
        if (!ok) throw ConfigError(field, message);
    };
    require(n_train >= 1, "n_train", "must be >= 1");
    require(n_limited >= 1, "n_limited", "must be >= 1");
    require(n_limited <= n_train, "n_limited", "must not exceed n_train");
    require(n_test >= 1, "n_test", "must be >= 1");
    require(n_sims >= 1, "n_sims", "must be >= 1");
    require(shift_q >= 1, "shift_q", "must be >= 1");
    require(!budget_fractions.empty(), "budget_fractions", "must list at least one fraction");
    for (double f : budget_fractions) require(f > 0.0 && f <= 1.0, "budget_fractions", "fractions must lie in (0, 1]");
    require(drift.size() == kJobseekerCovariates, "drift",
            "needs " + std::to_string(kJobseekerCovariates) + " entries, got " + std::to_string(drift.size()));
    require(noise_sd > 0.0, "noise_sd", "must be > 0");
    require(cv_folds >= 2, "cv_folds", "must be >= 2");
    require(!gb_learning_rates.empty(), "gb_learning_rates", "must not be empty");
    for (double lr : gb_learning_rates) require(lr > 0.0 && lr <= 1.0, "gb_learning_rates", "must lie in (0, 1]");
    require(!gb_max_depths.empty(), "gb_max_depths", "must not be empty");
    for (int d : gb_max_depths) require(d >= 1, "gb_max_depths", "must be >= 1");
    require(!gb_n_estimators.empty(), "gb_n_estimators", "must not be empty");
    for (int n : gb_n_estimators) require(n >= 0, "gb_n_estimators", "must be >= 0");
    require(!logistic_c.empty(), "logistic_c", "must not be empty");
    for (double c : logistic_c) require(c > 0.0, "logistic_c", "must be > 0");
    require(propensity_clip >= 0.0 && propensity_clip < 0.5, "propensity_clip", "must lie in [0, 0.5)");
    require(rf_trees >= 1, "rf_trees", "must be >= 1");
    require(rf_max_depth >= 1, "rf_max_depth", "must be >= 1");
    require(domain_p_min > 0.0 && domain_p_min < 0.5, "domain_p_min", "must lie in (0, 0.5)");
    require(knapsack_node_limit >= 1, "knapsack_node_limit", "must be >= 1");
    require(!output_dir.empty(), "output_dir", "must not be empty");
    require(threads >= 1, "threads", "must be >= 1");
    require(n_train >= 10 && n_test >= 10, "n_train", "shift induction needs at least 10 units per cohort");
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream out;
    out << "master_seed = " << master_seed << '\n'
        << "dgp_seed = " << dgp_seed << '\n'
        << "n_train = " << n_train << '\n'
        << "n_limited = " << n_limited << '\n'
        << "n_test = " << n_test << '\n'
        << "n_sims = " << n_sims << '\n'
        << "shift_q = " << shift_q << '\n'
        << "shift_m = " << shift_m << '\n'
        << "signed_weights = " << (signed_weights ? "true" : "false") << '\n'
        << "budget_fractions = " << join(budget_fractions) << '\n'
        << "drift = " << join(drift) << '\n'
        << "noise_sd = " << format_exact(noise_sd) << '\n'
        << "cv_folds = " << cv_folds << '\n'
        << "gb_learning_rates = " << join(gb_learning_rates) << '\n'
        << "gb_max_depths = " << join(gb_max_depths) << '\n'
        << "gb_n_estimators = " << join(gb_n_estimators) << '\n'
        << "logistic_c = " << join(logistic_c) << '\n'
        << "propensity_clip = " << format_exact(propensity_clip) << '\n'
        << "rf_trees = " << rf_trees << '\n'
        << "rf_max_depth = " << rf_max_depth << '\n'
        << "domain_p_min = " << format_exact(domain_p_min) << '\n'
        << "knapsack_node_limit = " << knapsack_node_limit << '\n'
        << "oracle_model = " << (oracle_model ? "true" : "false") << '\n'
        << "output_dir = " << output_dir << '\n'
        << "threads = " << threads << '\n';
    return out.str();
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, setter] : setters()) k.push_back(name);
        return k;
    }();
    return keys;
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig config;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto newline = text.find('\n', start);
        std::string_view line = text.substr(start, newline == std::string_view::npos ? text.npos : newline - start);
        start = newline == std::string_view::npos ? text.size() + 1 : newline + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));

        const auto& table = setters();
        const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
        if (it == table.end()) throw ConfigError(key, "unknown key (line " + std::to_string(line_no) + ")");
        if (!seen.insert(key).second) throw ConfigError(key, "repeated key (line " + std::to_string(line_no) + ")");
        it->second(config, key, value);
    }
    config.validate();
    return config;
}

ExperimentConfig validate_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("", "config file not found: " + path.string());
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError("", e.what());
    }
    return parse_config(text);
}

}  // namespace allocbench
