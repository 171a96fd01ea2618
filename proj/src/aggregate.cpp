#include "shiftspeech/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "shiftspeech/csv.hpp"
#include "shiftspeech/stats.hpp"

namespace shiftspeech {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

TimeBlockSeries block_series(std::string feature_name, std::span<const MinuteEvent> events, Reducer reducer) {
    std::array<double, kBlocksPerShift> sum{};
    std::array<std::size_t, kBlocksPerShift> count{};
    for (const auto& e : events) {
        if (e.minute_index < 0 || e.minute_index >= kShiftMinutes) continue;
        auto b = static_cast<std::size_t>(e.minute_index / kBlockMinutes);
        sum[b] += e.value;
        ++count[b];
    }
    TimeBlockSeries out;
    out.feature_name = std::move(feature_name);
    for (std::size_t b = 0; b < kBlocksPerShift; ++b) {
        if (count[b] == 0) continue;
        switch (reducer) {
            case Reducer::Count: out.blocks[b] = static_cast<double>(count[b]); break;
            case Reducer::Sum: out.blocks[b] = sum[b]; break;
            case Reducer::Mean: out.blocks[b] = sum[b] / static_cast<double>(count[b]); break;
        }
    }
    return out;
}

StartMiddleEnd start_middle_end(const TimeBlockSeries& series) {
    auto window = [&](std::size_t first) -> std::optional<double> {
        double acc = 0;
        int n = 0;
        for (std::size_t b = first; b < first + 4; ++b)
            if (series.blocks[b]) {
                acc += *series.blocks[b];
                ++n;
            }
        if (n == 0) return std::nullopt;
        return acc / n;
    };
    StartMiddleEnd sme{window(0), window(4), window(8)};
    if (!sme.start && !sme.middle && !sme.end) throw AllAbsent("start_middle_end: every block absent");
    return sme;
}

std::string_view feature_name(ShiftFeature f) {
    static constexpr std::array<std::string_view, kShiftFeatureCount> kNames{
        "inter_session_time", "gt1min_ratio_all", "gt1min_ratio_ns",  "gt1min_ratio_pat",  "occurrence_ns",
        "occurrence_pat",     "occurrence_loungemed", "occurrence_outside", "pos_arousal_all", "neg_arousal_all",
        "pos_arousal_ns",     "neg_arousal_ns",   "pos_arousal_pat",  "neg_arousal_pat"};
    return kNames[static_cast<std::size_t>(f)];
}

ShiftFeatures per_shift_features(std::span<const SpeechSession> sessions, std::span<const RatedRecording> rated,
                                 const LocationTimeline& timeline, double arousal_threshold) {
    ShiftFeatures out;
    out.participant_id = timeline.participant_id;
    out.shift_date = timeline.shift_date;
    out.n_sessions = sessions.size();
    out.n_recordings = rated.size();

    if (sessions.size() >= 2) {
        auto gaps = inter_session_times(sessions);
        out[ShiftFeature::InterSessionTime] = stats::mean(gaps);
    }
    if (!sessions.empty()) {
        out[ShiftFeature::Gt1minRatioAll] = gt1min_session_ratio(sessions);
        out[ShiftFeature::OccurrenceNs] = session_occurrence_rate(sessions, Location::NursingStation);
        out[ShiftFeature::OccurrencePat] = session_occurrence_rate(sessions, Location::PatientRoom);
        out[ShiftFeature::OccurrenceLoungeMed] = session_occurrence_rate(sessions, Location::LoungeMed);
        out[ShiftFeature::OccurrenceOutside] = session_occurrence_rate(sessions, Location::OutsideUnit);

        auto ratio_at = [&](Location loc) -> std::optional<double> {
            std::vector<SpeechSession> at;
            for (const auto& s : sessions)
                if (dominant_location(s) == loc) at.push_back(s);
            if (at.empty()) return std::nullopt;
            return gt1min_session_ratio(at);
        };
        out[ShiftFeature::Gt1minRatioNs] = ratio_at(Location::NursingStation);
        out[ShiftFeature::Gt1minRatioPat] = ratio_at(Location::PatientRoom);
    }

    auto ratios_at = [&](std::optional<Location> loc, ShiftFeature pos, ShiftFeature neg) {
        std::vector<double> fused;
        for (const auto& r : rated)
            if (!loc || location_of(timeline, r.minute_index) == *loc) fused.push_back(r.fused);
        if (fused.empty()) return;
        auto ar = arousal_ratios(fused, arousal_threshold);
        out[pos] = ar.pos;
        out[neg] = ar.neg;
    };
    ratios_at(std::nullopt, ShiftFeature::PosArousalAll, ShiftFeature::NegArousalAll);
    ratios_at(Location::NursingStation, ShiftFeature::PosArousalNs, ShiftFeature::NegArousalNs);
    ratios_at(Location::PatientRoom, ShiftFeature::PosArousalPat, ShiftFeature::NegArousalPat);
    return out;
}

const std::vector<std::string>& feature_schema() {
    static const std::vector<std::string> schema = [] {
        std::vector<std::string> s;
        for (std::size_t i = 0; i < kShiftFeatureCount; ++i) {
            std::string base(feature_name(static_cast<ShiftFeature>(i)));
            s.push_back(base + "_mean");
            s.push_back(base + "_std");
        }
        for (const char* pol : {"pos", "neg"})
            for (const char* win : {"start", "middle", "end"})
                s.push_back(std::string(pol) + "_arousal_" + win);
        for (const char* s2 : {"walk_ratio_mean", "walk_ratio_std", "sleep_hours_mean", "sleep_hours_std",
                               "shift_night", "unit_icu"})
            s.emplace_back(s2);
        return s;
    }();
    return schema;
}

namespace {

struct Moments {
    std::optional<double> mean;
    std::optional<double> std;
};

Moments moments(const std::vector<double>& v) {
    if (v.empty()) return {};
    double m = stats::mean(v);
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / static_cast<double>(v.size()))};
}

const TimeBlockSeries* find_series(const ParticipantBlocks& blocks, std::string_view name) {
    for (const auto& s : blocks.series)
        if (s.feature_name == name) return &s;
    return nullptr;
}

}  // namespace

ParticipantBlocks participant_blocks(const std::string& participant_id, std::span<const SpeechSession> sessions,
                                     std::span<const RatedRecording> rated, double arousal_threshold) {
    std::vector<MinuteEvent> rec_events, pos_events, neg_events, minute_events, gap_events;
    for (const auto& r : rated) {
        rec_events.push_back({r.minute_index, 1.0});
        pos_events.push_back({r.minute_index, r.fused > arousal_threshold ? 1.0 : 0.0});
        neg_events.push_back({r.minute_index, r.fused < -arousal_threshold ? 1.0 : 0.0});
    }
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        for (int m : sessions[i].minute_indices) minute_events.push_back({m, 1.0});
        if (i > 0 && sessions[i].shift_date == sessions[i - 1].shift_date)
            gap_events.push_back(
                {sessions[i].start(), static_cast<double>(sessions[i].start() - (sessions[i - 1].last() + 1))});
    }
    ParticipantBlocks out;
    out.participant_id = participant_id;
    out.series.push_back(block_series("recordings", rec_events, Reducer::Count));
    out.series.push_back(block_series("session_minutes", minute_events, Reducer::Count));
    out.series.push_back(block_series("pos_arousal", pos_events, Reducer::Mean));
    out.series.push_back(block_series("neg_arousal", neg_events, Reducer::Mean));
    out.series.push_back(block_series("inter_session_time", gap_events, Reducer::Mean));
    return out;
}

ParticipantFeatureVector aggregate_participant(const ParticipantProfile& profile,
                                               std::span<const ShiftFeatures> shifts,
                                               const ParticipantBlocks& blocks,
                                               std::span<const DailyPhysiology> physiology) {
    ParticipantFeatureVector out;
    out.participant_id = profile.participant_id;
    out.values.reserve(feature_schema().size());

    for (std::size_t f = 0; f < kShiftFeatureCount; ++f) {
        std::vector<double> v;
        for (const auto& s : shifts)
            if (s.values[f]) v.push_back(*s.values[f]);
        auto m = moments(v);
        out.values.push_back(m.mean);
        out.values.push_back(m.std);
    }

    for (const char* name : {"pos_arousal", "neg_arousal"}) {
        StartMiddleEnd sme;
        if (const auto* s = find_series(blocks, name)) {
            try {
                sme = start_middle_end(*s);
            } catch (const AllAbsent&) {
            }
        }
        out.values.push_back(sme.start);
        out.values.push_back(sme.middle);
        out.values.push_back(sme.end);
    }

    std::vector<double> walk, sleep;
    for (const auto& p : physiology) {
        walk.push_back(p.walk_ratio);
        sleep.push_back(p.sleep_hours);
    }
    auto wm = moments(walk), sm = moments(sleep);
    out.values.push_back(wm.mean);
    out.values.push_back(wm.std);
    out.values.push_back(sm.mean);
    out.values.push_back(sm.std);
    out.values.push_back(profile.shift_type == ShiftType::Night ? 1.0 : 0.0);
    out.values.push_back(profile.unit_type == UnitType::ICU ? 1.0 : 0.0);
    return out;
}

// ---------------------------------------------------------------------------
// Feature table
// ---------------------------------------------------------------------------

std::optional<std::size_t> FeatureTable::column_index(std::string_view name) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
        if (columns[j] == name) return j;
    return std::nullopt;
}

std::vector<double> FeatureTable::column(std::size_t j) const {
    std::vector<double> c;
    c.reserve(rows.size());
    for (const auto& r : rows) c.push_back(r[j]);
    return c;
}

std::vector<double> FeatureTable::label(std::string_view name) const {
    for (std::size_t k = 0; k < kLabelNames.size(); ++k) {
        if (name != kLabelNames[k]) continue;
        std::vector<double> v;
        for (const auto& l : labels) v.push_back(l[k]);
        return v;
    }
    throw Error("unknown label '" + std::string(name) + "'");
}

FeatureTable build_feature_matrix(std::span<const ParticipantFeatureVector> vectors,
                                  std::span<const ParticipantProfile> profiles) {
    FeatureTable t;
    t.columns = feature_schema();
    const std::size_t d = t.columns.size();

    std::map<std::string, const ParticipantProfile*, std::less<>> by_id;
    for (const auto& p : profiles) by_id[p.participant_id] = &p;

    for (const auto& v : vectors) {
        if (v.values.size() != d) throw Error("feature vector does not match schema");
        auto it = by_id.find(v.participant_id);
        if (it == by_id.end()) throw Error("no profile for " + v.participant_id);
        const ParticipantProfile& p = *it->second;
        t.participant_ids.push_back(v.participant_id);
        t.shift_types.push_back(p.shift_type);
        t.unit_types.push_back(p.unit_type);
        t.labels.push_back({static_cast<double>(p.pos_affect), static_cast<double>(p.neg_affect), p.life_satisfaction});
        std::vector<double> row(d);
        for (std::size_t j = 0; j < d; ++j) row[j] = v.values[j].value_or(kNaN);
        t.rows.push_back(std::move(row));
    }

    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> present;
        for (const auto& r : t.rows)
            if (!std::isnan(r[j])) present.push_back(r[j]);
        double fill = present.empty() ? 0.0 : stats::median(present);
        for (auto& r : t.rows)
            if (std::isnan(r[j])) r[j] = fill;
    }
    return t;
}

namespace {

bool is_unit_interval_feature(std::string_view name) {
    for (std::string_view prefix : {"gt1min_ratio", "occurrence", "pos_arousal", "neg_arousal", "walk_ratio",
                                    "shift_night", "unit_icu"})
        if (name.substr(0, prefix.size()) == prefix) return true;
    return false;
}

}  // namespace

void write_features_csv(const std::filesystem::path& path, const FeatureTable& table) {
    csv::Writer w(path);
    std::vector<std::string> header{"participant_id", "shift_type", "unit_type"};
    header.insert(header.end(), table.columns.begin(), table.columns.end());
    for (const char* l : kLabelNames) header.emplace_back(l);
    w.header(header);
    for (std::size_t i = 0; i < table.size(); ++i) {
        std::vector<std::string> row{table.participant_ids[i], std::string(to_string(table.shift_types[i])),
                                     std::string(to_string(table.unit_types[i]))};
        for (double v : table.rows[i]) row.push_back(csv::format_double(v));
        for (double l : table.labels[i]) row.push_back(csv::format_double(l));
        w.row(row);
    }
}

FeatureTable read_features_csv(const std::filesystem::path& path) {
    FeatureTable t;
    std::vector<std::string> header;
    const std::string file = path.filename().string();
    header = csv::read_file_any_header(path, [&](const csv::Row& r) {
        try {
            if (r.fields.size() < 6) throw Error("too few columns");
            const std::size_t d = r.fields.size() - 6;
            t.participant_ids.emplace_back(r.fields[0]);
            t.shift_types.push_back(parse_shift_type(r.fields[1]));
            t.unit_types.push_back(parse_unit_type(r.fields[2]));
            std::vector<double> row(d);
            for (std::size_t j = 0; j < d; ++j) {
                row[j] = csv::parse_double(r.fields[3 + j]);
                if (!std::isfinite(row[j])) throw Error("non-finite feature value");
            }
            std::array<double, 3> lab{};
            for (std::size_t k = 0; k < 3; ++k) lab[k] = csv::parse_double(r.fields[3 + d + k]);
            if (lab[0] < 10 || lab[0] > 50 || lab[1] < 10 || lab[1] > 50 || lab[2] < 1 || lab[2] > 7)
                throw Error("label outside its scale");
            t.rows.push_back(std::move(row));
            t.labels.push_back(lab);
        } catch (const std::exception& e) {
            throw MalformedRow(file, r.line, e.what());
        }
    });
    if (header.size() < 6 || header[0] != "participant_id" || header[1] != "shift_type" ||
        header[2] != "unit_type" || header[header.size() - 3] != kLabelNames[0] ||
        header[header.size() - 2] != kLabelNames[1] || header[header.size() - 1] != kLabelNames[2])
        throw MalformedRow(file, 1, "unexpected features.csv header");
    t.columns.assign(header.begin() + 3, header.end() - 3);
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
        if (!is_unit_interval_feature(t.columns[j])) continue;
        for (std::size_t i = 0; i < t.rows.size(); ++i)
            if (t.rows[i][j] < 0 || t.rows[i][j] > 1)
                throw MalformedRow(file, i + 2, t.columns[j] + " outside [0,1]");
    }
    return t;
}

void write_blocks_csv(const std::filesystem::path& path, std::span<const ParticipantBlocks> blocks) {
    csv::Writer w(path);
    std::vector<std::string> header{"participant_id", "feature"};
    for (int b = 0; b < kBlocksPerShift; ++b) header.push_back("b" + std::to_string(b));
    w.header(header);
    for (const auto& pb : blocks)
        for (const auto& s : pb.series) {
            std::vector<std::string> row{pb.participant_id, s.feature_name};
            for (const auto& v : s.blocks) row.push_back(csv::format_optional(v));
            w.row(row);
        }
}

std::vector<ParticipantBlocks> read_blocks_csv(const std::filesystem::path& path) {
    std::vector<std::string> header{"participant_id", "feature"};
    for (int b = 0; b < kBlocksPerShift; ++b) header.push_back("b" + std::to_string(b));
    std::vector<ParticipantBlocks> out;
    csv::read_file(path, header, [&](const csv::Row& r) {
        try {
            std::string id(r.fields[0]);
            if (out.empty() || out.back().participant_id != id) out.push_back({id, {}});
            TimeBlockSeries s;
            s.feature_name = std::string(r.fields[1]);
            for (std::size_t b = 0; b < kBlocksPerShift; ++b) {
                s.blocks[b] = csv::parse_optional_double(r.fields[2 + b]);
                if (s.blocks[b] && !std::isfinite(*s.blocks[b])) throw Error("non-finite block value");
            }
            out.back().series.push_back(std::move(s));
        } catch (const std::exception& e) {
            throw MalformedRow(path.filename().string(), r.line, e.what());
        }
    });
    return out;
}

}  // namespace shiftspeech
