#include "shiftspeech/predict.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "shiftspeech/common.hpp"
#include "shiftspeech/stats.hpp"

namespace shiftspeech {

using nlohmann::json;

std::vector<int> binarize_label(std::span<const double> values) {
    if (values.size() < 2) throw EmptyInput("binarize_label: need at least two values");
    const double med = stats::median(values);
    std::vector<int> out;
    out.reserve(values.size());
    std::size_t ones = 0;
    for (double v : values) {
        out.push_back(v > med ? 1 : 0);
        ones += out.back();
    }
    if (ones == 0 || ones == values.size()) throw DegenerateLabel("binarize_label: median split leaves one class");
    return out;
}

Matrix NormalizationParams::apply(const Matrix& x) const {
    Matrix out = x;
    for (auto& row : out)
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = constant[j] ? 0.0 : (row[j] - mean[j]) / std[j];
    return out;
}

std::pair<Matrix, NormalizationParams> znormalize(const Matrix& x) {
    if (x.size() < 2) throw TooFewSamples("znormalize: need at least two rows");
    const std::size_t n = x.size(), d = x.front().size();
    NormalizationParams p;
    p.mean.assign(d, 0.0);
    p.std.assign(d, 0.0);
    p.constant.assign(d, false);
    for (std::size_t j = 0; j < d; ++j) {
        double m = 0;
        for (const auto& r : x) m += r[j];
        m /= static_cast<double>(n);
        double ss = 0;
        for (const auto& r : x) ss += (r[j] - m) * (r[j] - m);
        p.mean[j] = m;
        p.std[j] = std::sqrt(ss / static_cast<double>(n));
        p.constant[j] = !(p.std[j] > 0);
    }
    Matrix z = p.apply(x);
    // Second pass removes the residual mean left by rounding.
    for (std::size_t j = 0; j < d; ++j) {
        if (p.constant[j]) continue;
        double m = 0;
        for (const auto& r : z) m += r[j];
        m /= static_cast<double>(n);
        for (auto& r : z) r[j] -= m;
    }
    return {std::move(z), std::move(p)};
}

double micro_f1(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size()) throw LengthMismatch("micro_f1: length mismatch");
    if (pred.empty()) throw EmptyInput("micro_f1: empty input");
    double tp = 0, fp = 0, fn = 0;
    for (int c : {0, 1}) {
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (pred[i] == c && truth[i] == c) ++tp;
            if (pred[i] == c && truth[i] != c) ++fp;
            if (pred[i] != c && truth[i] == c) ++fn;
        }
    }
    double denom = 2 * tp + fp + fn;
    return denom > 0 ? 2 * tp / denom : 0.0;
}

Dataset make_dataset(const Matrix& raw, std::span<const int> y, std::vector<std::string> columns) {
    auto [z, params] = znormalize(raw);
    return {std::move(z), std::vector<int>(y.begin(), y.end()), std::move(columns), std::move(params)};
}

std::vector<ForestParams> default_grid() {
    std::vector<ForestParams> grid;
    for (int trees : {100, 200, 400})
        for (int depth : {4, 8, -1})
            for (int leaf : {1, 2, 5}) grid.push_back({trees, depth, leaf, 0, true});
    return grid;
}

std::vector<int> stratified_folds(std::span<const int> y, int k, std::uint64_t seed) {
    if (k < 2) throw Error("stratified_folds: k must be >= 2");
    std::vector<int> fold(y.size(), -1);
    std::mt19937_64 rng(splitmix64(seed));
    // Class 1 continues the round-robin where class 0 stopped, keeping fold sizes balanced.
    std::size_t offset = 0;
    for (int c : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == c) members.push_back(i);
        if (members.size() < static_cast<std::size_t>(k))
            throw TooFewSamples("stratified_folds: class smaller than fold count");
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t m = 0; m < members.size(); ++m)
            fold[members[m]] = static_cast<int>((offset + m) % static_cast<std::size_t>(k));
        offset += members.size();
    }
    return fold;
}

CvReport cross_validate(const Matrix& raw, std::span<const int> y, const std::vector<std::string>& columns,
                        const std::vector<ForestParams>& grid, int k, std::uint64_t seed, std::string label) {
    if (raw.size() < static_cast<std::size_t>(k)) throw TooFewSamples("cross_validate: fewer rows than folds");
    if (grid.empty()) throw Error("cross_validate: empty grid");
    auto fold = stratified_folds(y, k, seed);

    struct Split {
        Matrix train_x, test_x;
        std::vector<int> train_y, test_y;
    };
    std::vector<Split> splits(static_cast<std::size_t>(k));
    for (int f = 0; f < k; ++f) {
        Split& s = splits[static_cast<std::size_t>(f)];
        Matrix train_raw, test_raw;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (fold[i] == f) {
                test_raw.push_back(raw[i]);
                s.test_y.push_back(y[i]);
            } else {
                train_raw.push_back(raw[i]);
                s.train_y.push_back(y[i]);
            }
        }
        auto [z, params] = znormalize(train_raw);
        s.train_x = std::move(z);
        s.test_x = params.apply(test_raw);
    }

    CvReport report;
    report.label = std::move(label);
    report.seed = seed;
    report.folds = k;
    for (const auto& cfg : grid) {
        ConfigScore score;
        score.params = cfg;
        for (int f = 0; f < k; ++f) {
            const Split& s = splits[static_cast<std::size_t>(f)];
            auto model = train_forest(s.train_x, s.train_y, cfg, splitmix64(seed ^ static_cast<std::uint64_t>(f + 1)));
            score.fold_f1.push_back(micro_f1(model.predict(s.test_x), s.test_y));
        }
        score.micro_f1 = stats::mean(score.fold_f1);
        report.grid.push_back(std::move(score));
    }
    for (std::size_t g = 1; g < report.grid.size(); ++g)
        if (report.grid[g].micro_f1 > report.grid[report.best_index].micro_f1) report.best_index = g;

    auto all = make_dataset(raw, y, columns);
    auto final_model = train_forest(all.x, all.y, report.best().params, splitmix64(seed ^ 0ull));
    const auto& imp = final_model.importances();
    for (std::size_t j = 0; j < imp.size(); ++j) report.importances.push_back({columns.at(j), imp[j]});
    std::stable_sort(report.importances.begin(), report.importances.end(),
                     [](const FeatureWeight& a, const FeatureWeight& b) { return a.weight > b.weight; });
    return report;
}

namespace {

json config_json(const ForestParams& p) {
    return json{{"n_trees", p.n_trees},
                {"max_depth", p.max_depth < 0 ? json(nullptr) : json(p.max_depth)},
                {"min_leaf", p.min_leaf},
                {"features_per_split", p.features_per_split == 0 ? json("sqrt") : json(p.features_per_split)}};
}

ForestParams config_from_json(const json& j) {
    ForestParams p;
    p.n_trees = j.at("n_trees").get<int>();
    p.max_depth = j.at("max_depth").is_null() ? -1 : j.at("max_depth").get<int>();
    p.min_leaf = j.at("min_leaf").get<int>();
    const json& fps = j.at("features_per_split");
    p.features_per_split = fps.is_string() ? 0 : fps.get<int>();
    return p;
}

json weights_json(std::span<const FeatureWeight> w) {
    json arr = json::array();
    for (const auto& fw : w) arr.push_back({{"feature", fw.feature}, {"weight", fw.weight}});
    return arr;
}

}  // namespace

void write_report_json(const std::filesystem::path& path, const CvReport& report, std::size_t top_n) {
    json grid = json::array();
    for (const auto& g : report.grid) grid.push_back({{"config", config_json(g.params)}, {"micro_f1", g.micro_f1}});
    std::span<const FeatureWeight> all(report.importances);
    json j{{"label", report.label},
           {"best_config", config_json(report.best().params)},
           {"cv_micro_f1", report.best().micro_f1},
           {"importances", weights_json(all.first(std::min(top_n, all.size())))},
           {"all_importances", weights_json(all)},
           {"seed", report.seed},
           {"folds", report.folds},
           {"grid", grid}};
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

ReportSummary read_report_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        json j = json::parse(in);
        ReportSummary r;
        r.label = j.at("label").get<std::string>();
        r.best_config = config_from_json(j.at("best_config"));
        r.cv_micro_f1 = j.at("cv_micro_f1").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        if (!(r.cv_micro_f1 >= 0 && r.cv_micro_f1 <= 1)) throw Error("cv_micro_f1 outside [0,1]");
        for (const auto& w : j.at("importances")) {
            FeatureWeight fw{w.at("feature").get<std::string>(), w.at("weight").get<double>()};
            if (!(fw.weight >= 0 && fw.weight <= 1)) throw Error("importance outside [0,1]");
            r.importances.push_back(std::move(fw));
        }
        double total = 0;
        for (const auto& w : j.at("all_importances")) total += w.at("weight").get<double>();
        if (std::abs(total - 1.0) > 1e-9) throw Error("importances do not sum to 1");
        return r;
    } catch (const MalformedRow&) {
        throw;
    } catch (const std::exception& e) {
        throw MalformedRow(path.filename().string(), 0, e.what());
    }
}

}  // namespace shiftspeech
