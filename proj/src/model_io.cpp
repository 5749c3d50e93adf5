#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "allocbench/errors.hpp"
#include "allocbench/xlearner.hpp"

namespace allocbench {
namespace {

constexpr const char* kMagic = "allocbench-xlearner";
constexpr int kVersion = 1;

std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

void write_boosting(std::ostream& out, const char* role, const GradientBoostedModel& m) {
    out << "boosting " << role << '\n'
        << "init " << hex(m.init()) << '\n'
        << "learning_rate " << hex(m.params().learning_rate) << '\n'
        << "max_depth " << m.params().max_depth << '\n'
        << "n_estimators " << m.params().n_estimators << '\n'
        << "trees " << m.trees().size() << '\n';
    for (const auto& tree : m.trees()) {
        out << "tree " << tree.nodes().size() << '\n';
        for (const auto& n : tree.nodes())
            out << n.feature << ' ' << hex(n.threshold) << ' ' << n.left << ' ' << n.right << ' ' << hex(n.value)
                << '\n';
    }
    out << "end\n";
}

// Whitespace-separated tokens with line tracking for error messages.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::string word() {
        while (!line_.good() || line_.peek() == EOF) {
            std::string text;
            if (!std::getline(in_, text)) throw ParseError(line_no_, "unexpected end of model file");
            ++line_no_;
            line_.clear();
            line_.str(text);
            line_ >> std::ws;
        }
        std::string w;
        line_ >> w;
        line_ >> std::ws;
        return w;
    }

    void expect(const std::string& keyword) {
        const auto w = word();
        if (w != keyword) fail("expected '" + keyword + "', found '" + w + "'");
    }

    double real() {
        const auto w = word();
        char* end = nullptr;
        const double v = std::strtod(w.c_str(), &end);
        if (w.empty() || end != w.c_str() + w.size()) fail("bad number '" + w + "'");
        return v;
    }

    long long integer() {
        const auto w = word();
        char* end = nullptr;
        const long long v = std::strtoll(w.c_str(), &end, 10);
        if (w.empty() || end != w.c_str() + w.size()) fail("bad integer '" + w + "'");
        return v;
    }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_no_, message); }

private:
    std::istream& in_;
    std::istringstream line_;
    std::size_t line_no_ = 0;
};

GradientBoostedModel read_boosting(Reader& r, const char* role) {
    r.expect("boosting");
    r.expect(role);
    r.expect("init");
    const double init = r.real();
    BoostingParams params;
    r.expect("learning_rate");
    params.learning_rate = r.real();
    r.expect("max_depth");
    params.max_depth = static_cast<int>(r.integer());
    r.expect("n_estimators");
    params.n_estimators = static_cast<int>(r.integer());
    r.expect("trees");
    const auto n_trees = r.integer();
    if (n_trees < 0) r.fail("negative tree count");
    std::vector<RegressionTree> trees;
    for (long long t = 0; t < n_trees; ++t) {
        r.expect("tree");
        const auto n_nodes = r.integer();
        if (n_nodes < 1) r.fail("tree without nodes");
        std::vector<TreeNode> nodes(static_cast<std::size_t>(n_nodes));
        for (auto& n : nodes) {
            n.feature = static_cast<int>(r.integer());
            n.threshold = r.real();
            n.left = static_cast<std::int32_t>(r.integer());
            n.right = static_cast<std::int32_t>(r.integer());
            n.value = r.real();
        }
        try {
            trees.emplace_back(std::move(nodes));
        } catch (const std::invalid_argument& e) {
            r.fail(e.what());
        }
    }
    r.expect("end");
    return GradientBoostedModel(init, params, std::move(trees));
}

}  // namespace

void save_model(std::ostream& out, const XLearnerModel& model) {
    out << kMagic << ' ' << kVersion << '\n'
        << "n_features " << model.n_features << '\n'
        << "propensity_clip " << hex(model.propensity_clip) << '\n';
    write_boosting(out, "mu0", model.mu0);
    write_boosting(out, "mu1", model.mu1);
    write_boosting(out, "tau0", model.tau0);
    write_boosting(out, "tau1", model.tau1);
    out << "logistic g\n"
        << "C " << hex(model.g.inverse_regularization()) << '\n'
        << "intercept " << hex(model.g.intercept()) << '\n'
        << "weights " << model.g.weights().size();
    for (double w : model.g.weights()) out << ' ' << hex(w);
    out << "\nend\n";
}

XLearnerModel load_model(std::istream& in) {
    Reader r(in);
    r.expect(kMagic);
    if (r.integer() != kVersion) r.fail("unsupported model version");
    XLearnerModel model;
    r.expect("n_features");
    const auto d = r.integer();
    if (d < 1) r.fail("n_features must be >= 1");
    model.n_features = static_cast<std::size_t>(d);
    r.expect("propensity_clip");
    model.propensity_clip = r.real();
    model.mu0 = read_boosting(r, "mu0");
    model.mu1 = read_boosting(r, "mu1");
    model.tau0 = read_boosting(r, "tau0");
    model.tau1 = read_boosting(r, "tau1");
    r.expect("logistic");
    r.expect("g");
    r.expect("C");
    const double c = r.real();
    r.expect("intercept");
    const double intercept = r.real();
    r.expect("weights");
    if (r.integer() != d) r.fail("weight count differs from n_features");
    std::vector<double> weights(model.n_features);
    for (auto& w : weights) w = r.real();
    r.expect("end");
    model.g = LogisticModel(std::move(weights), intercept, c);
    return model;
}

}  // namespace allocbench
