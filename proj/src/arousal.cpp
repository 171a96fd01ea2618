#include "shiftspeech/arousal.hpp"

#include <algorithm>
#include <cmath>

#include "shiftspeech/csv.hpp"
#include "shiftspeech/stats.hpp"

namespace shiftspeech {

std::string_view to_string(ProsodicFeature f) {
    switch (f) {
        case ProsodicFeature::LogPitch: return "log_pitch";
        case ProsodicFeature::Intensity: return "intensity";
        case ProsodicFeature::HfLfRatio: return "hf_lf_ratio";
    }
    return "?";
}

NeutralModel build_neutral(std::span<const RecordingSegment> speaker_recordings) {
    NeutralModel model;
    for (const auto& rec : speaker_recordings) {
        for (const auto& f : rec.frames) {
            if (f.voiced()) model.pools[0].push_back(f.log_pitch);
            model.pools[1].push_back(f.intensity);
            model.pools[2].push_back(f.hf_lf_ratio);
        }
    }
    for (std::size_t i = 0; i < kProsodicFeatures; ++i) {
        if (model.pools[i].empty())
            throw InsufficientData(std::string("no frames for ") +
                                   std::string(to_string(static_cast<ProsodicFeature>(i))));
        std::sort(model.pools[i].begin(), model.pools[i].end());
    }
    return model;
}

double percentile_score(double x, std::span<const double> sorted_pool) {
    if (sorted_pool.empty()) throw EmptyPool("percentile_score: empty pool");
    auto lo = std::lower_bound(sorted_pool.begin(), sorted_pool.end(), x);
    auto hi = std::upper_bound(lo, sorted_pool.end(), x);
    const double below = static_cast<double>(lo - sorted_pool.begin());
    const double equal = static_cast<double>(hi - lo);
    const double n = static_cast<double>(sorted_pool.size());
    // Compare in count space so the extremes come out exactly +-1.
    return (2.0 * below + equal - n) / n;
}

std::array<std::optional<double>, kProsodicFeatures> recording_medians(const RecordingSegment& recording) {
    std::array<std::vector<double>, kProsodicFeatures> values;
    for (const auto& f : recording.frames) {
        if (f.voiced()) values[0].push_back(f.log_pitch);
        values[1].push_back(f.intensity);
        values[2].push_back(f.hf_lf_ratio);
    }
    std::array<std::optional<double>, kProsodicFeatures> out;
    for (std::size_t i = 0; i < kProsodicFeatures; ++i)
        if (!values[i].empty()) out[i] = stats::median(values[i]);
    return out;
}

ScoreTriple score_recording(const RecordingSegment& recording, const NeutralModel& model) {
    auto medians = recording_medians(recording);
    ScoreTriple p{};
    for (std::size_t i = 0; i < kProsodicFeatures; ++i)
        p[i] = medians[i] ? percentile_score(*medians[i], model.pools[i]) : 0.0;
    return p;
}

namespace {

FusionWeights uniform_weights() {
    FusionWeights fw;
    fw.w.fill(1.0 / std::sqrt(3.0));
    fw.fallback = true;
    return fw;
}

}  // namespace

FusionWeights fusion_weights(std::span<const ScoreTriple> scores) {
    if (scores.size() < 2) throw TooFewRecordings("fusion_weights: need at least two recordings");
    const std::size_t n = scores.size();
    std::array<std::vector<double>, kProsodicFeatures> per_feature;
    std::vector<double> mean_score(n);
    for (auto& v : per_feature) v.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < kProsodicFeatures; ++i) per_feature[i][j] = scores[j][i];
        mean_score[j] = (scores[j][0] + scores[j][1] + scores[j][2]) / 3.0;
    }

    FusionWeights fw;
    double norm2 = 0;
    for (std::size_t i = 0; i < kProsodicFeatures; ++i) {
        try {
            fw.r[i] = stats::spearman_rho(per_feature[i], mean_score);
        } catch (const ConstantInput&) {
            fw.r[i] = 0.0;
        }
        norm2 += fw.r[i] * fw.r[i];
    }
    if (norm2 == 0.0) {
        auto uniform = uniform_weights();
        uniform.r = fw.r;
        return uniform;
    }
    const double norm = std::sqrt(norm2);
    for (std::size_t i = 0; i < kProsodicFeatures; ++i) fw.w[i] = fw.r[i] / norm;
    return fw;
}

ArousalRatios arousal_ratios(std::span<const double> fused, double threshold) {
    if (fused.empty()) throw EmptyInput("arousal_ratios: no rated recordings");
    std::size_t pos = 0, neg = 0;
    for (double f : fused) {
        if (f > threshold) ++pos;
        if (f < -threshold) ++neg;
    }
    const auto n = static_cast<double>(fused.size());
    return {static_cast<double>(pos) / n, static_cast<double>(neg) / n};
}

std::vector<RatedRecording> rate_speaker(std::span<const RecordingSegment> speaker_recordings,
                                         FusionWeights* weights_out) {
    std::vector<RatedRecording> rated;
    if (speaker_recordings.empty()) return rated;

    const NeutralModel model = build_neutral(speaker_recordings);
    std::vector<ScoreTriple> scores;
    scores.reserve(speaker_recordings.size());
    for (const auto& rec : speaker_recordings) scores.push_back(score_recording(rec, model));

    const FusionWeights weights = scores.size() >= 2 ? fusion_weights(scores) : uniform_weights();
    if (weights_out) *weights_out = weights;

    rated.reserve(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j) {
        const auto& rec = speaker_recordings[j];
        rated.push_back({rec.participant_id, rec.shift_date, rec.minute_index, scores[j],
                         rate_recording(scores[j], weights)});
    }
    return rated;
}

namespace {
const std::vector<std::string> kArousalHeader{"participant_id", "shift_date",  "minute_index", "p_pitch",
                                              "p_intensity",    "p_hflf",      "fused"};
}

void write_arousal_csv(const std::filesystem::path& path, std::span<const RatedRecording> rows) {
    csv::Writer w(path);
    w.header(kArousalHeader);
    for (const auto& r : rows)
        w.row({r.participant_id, r.shift_date.to_string(), std::to_string(r.minute_index),
               csv::format_double(r.p[0]), csv::format_double(r.p[1]), csv::format_double(r.p[2]),
               csv::format_double(r.fused)});
}

std::vector<RatedRecording> read_arousal_csv(const std::filesystem::path& path) {
    std::vector<RatedRecording> out;
    csv::read_file(path, kArousalHeader, [&](const csv::Row& r) {
        try {
            RatedRecording rr;
            rr.participant_id = std::string(r.fields[0]);
            rr.shift_date = ShiftDate::parse(r.fields[1]);
            rr.minute_index = csv::parse_int(r.fields[2]);
            if (rr.minute_index < 0 || rr.minute_index >= kShiftMinutes) throw Error("minute_index outside shift");
            for (std::size_t i = 0; i < kProsodicFeatures; ++i) {
                rr.p[i] = csv::parse_double(r.fields[3 + i]);
                if (rr.p[i] < -1.0 || rr.p[i] > 1.0) throw Error("score outside [-1,1]");
            }
            rr.fused = csv::parse_double(r.fields[6]);
            if (std::abs(rr.fused) > std::sqrt(3.0) + 1e-12) throw Error("fused rating outside [-sqrt3, sqrt3]");
            out.push_back(std::move(rr));
        } catch (const std::exception& e) {
            throw MalformedRow(path.filename().string(), r.line, e.what());
        }
    });
    return out;
}

}  // namespace shiftspeech
