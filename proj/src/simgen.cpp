#include "shiftspeech/simgen.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "shiftspeech/compare.hpp"
#include "shiftspeech/stats.hpp"

namespace shiftspeech {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Spec file
// ---------------------------------------------------------------------------

namespace {

struct Field {
    std::string key;
    double* d = nullptr;
    int* i = nullptr;
    std::uint64_t* u = nullptr;
};

std::vector<Field> fields_of(CohortSpec& s) {
    std::vector<Field> f;
    auto dbl = [&](std::string k, double& v) { f.push_back({std::move(k), &v, nullptr, nullptr}); };
    auto integer = [&](std::string k, int& v) { f.push_back({std::move(k), nullptr, &v, nullptr}); };
    auto pair = [&](const std::string& k, std::array<double, 2>& v) {
        dbl(k + "_day", v[0]);
        dbl(k + "_night", v[1]);
    };
    auto occupancy = [&](const std::string& k, Occupancy& v) {
        dbl(k + "_ns", v[0]);
        dbl(k + "_pat", v[1]);
        dbl(k + "_loungemed", v[2]);
        dbl(k + "_outside", v[3]);
    };
    f.push_back({"seed", nullptr, nullptr, &s.seed});
    integer("n_per_cell", s.n_per_cell);
    integer("n_shifts", s.n_shifts);
    dbl("short_participant_fraction", s.short_participant_fraction);
    integer("short_participant_shifts", s.short_participant_shifts);
    integer("frames_per_recording", s.frames_per_recording);
    dbl("foreground_fraction", s.foreground_fraction);
    dbl("background_foreground_fraction", s.background_foreground_fraction);
    dbl("background_rate", s.background_rate);
    dbl("out_of_window_rate", s.out_of_window_rate);
    dbl("voiced_fraction", s.voiced_fraction);
    pair("inter_session", s.inter_session);
    dbl("inter_session_cv", s.inter_session_cv);
    dbl("interaction_rate_sd", s.interaction_rate_sd);
    pair("gt1min", s.gt1min);
    occupancy("occupancy_icu", s.occupancy_icu);
    occupancy("occupancy_non_icu", s.occupancy_non_icu);
    dbl("room_stay_prob", s.room_stay_prob);
    dbl("arousal_pos_base", s.arousal_pos_base);
    dbl("arousal_neg_base", s.arousal_neg_base);
    pair("arousal_pos_shift", s.arousal_pos_shift);
    pair("arousal_neg_shift", s.arousal_neg_shift);
    integer("arousal_window_start", s.arousal_window_start);
    integer("arousal_window_end", s.arousal_window_end);
    dbl("arousal_trait_scale", s.arousal_trait_scale);
    dbl("arousal_offset_sd", s.arousal_offset_sd);
    pair("walk_ratio", s.walk_ratio);
    dbl("walk_ratio_sd", s.walk_ratio_sd);
    pair("sleep_hours", s.sleep_hours);
    dbl("sleep_hours_sd", s.sleep_hours_sd);
    dbl("sleep_trait_scale", s.sleep_trait_scale);
    dbl("label_pos_coupling", s.label_pos_coupling);
    dbl("label_neg_coupling", s.label_neg_coupling);
    dbl("label_swls_coupling", s.label_swls_coupling);
    dbl("label_noise", s.label_noise);
    return f;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <class T>
T parse_number(std::string_view text, const std::string& key) {
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw InvalidSpec(fmt::format("{}: cannot parse '{}'", key, text));
    return v;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidSpec(what);
}

bool is_prob(double p) { return p >= 0 && p <= 1; }

}  // namespace

void CohortSpec::validate() const {
    CohortSpec copy = *this;
    for (const auto& f : fields_of(copy))
        if (f.d) require(std::isfinite(*f.d), f.key + " must be finite");
    require(n_per_cell >= 1 && n_per_cell <= 24999, "n_per_cell must be in [1, 24999]");
    require(n_shifts >= 1 && n_shifts <= 366, "n_shifts must be in [1, 366]");
    require(short_participant_shifts >= 1, "short_participant_shifts must be >= 1");
    require(frames_per_recording >= 1, "frames_per_recording must be >= 1");
    for (auto [name, p] : {std::pair{"short_participant_fraction", short_participant_fraction},
                           {"foreground_fraction", foreground_fraction},
                           {"background_foreground_fraction", background_foreground_fraction},
                           {"background_rate", background_rate},
                           {"out_of_window_rate", out_of_window_rate},
                           {"voiced_fraction", voiced_fraction},
                           {"gt1min_day", gt1min[0]},
                           {"gt1min_night", gt1min[1]},
                           {"room_stay_prob", room_stay_prob},
                           {"arousal_pos_base", arousal_pos_base},
                           {"arousal_neg_base", arousal_neg_base},
                           {"walk_ratio_day", walk_ratio[0]},
                           {"walk_ratio_night", walk_ratio[1]}})
        require(is_prob(p), fmt::format("{} must be in [0, 1]", name));
    require(arousal_pos_base + arousal_neg_base <= 1, "arousal_pos_base + arousal_neg_base must be <= 1");
    for (int s = 0; s < 2; ++s) {
        require(is_prob(arousal_pos_base + arousal_pos_shift[s]), "arousal_pos_base + shift must be in [0, 1]");
        require(is_prob(arousal_neg_base + arousal_neg_shift[s]), "arousal_neg_base + shift must be in [0, 1]");
        require(inter_session[s] > 0, "inter_session medians must be > 0");
        require(sleep_hours[s] >= 0 && sleep_hours[s] <= 24, "sleep_hours must be in [0, 24]");
    }
    for (const Occupancy* occ : {&occupancy_icu, &occupancy_non_icu}) {
        double total = 0;
        for (double p : *occ) {
            require(is_prob(p), "occupancy entries must be in [0, 1]");
            total += p;
        }
        require(std::abs(total - 1) < 1e-6, "occupancy entries must sum to 1");
    }
    require(arousal_window_start >= 0 && arousal_window_start <= arousal_window_end &&
                arousal_window_end < kBlocksPerShift,
            "arousal window must satisfy 0 <= start <= end <= 11");
    for (auto [name, v] : {std::pair{"inter_session_cv", inter_session_cv},
                           {"interaction_rate_sd", interaction_rate_sd},
                           {"arousal_offset_sd", arousal_offset_sd},
                           {"arousal_trait_scale", arousal_trait_scale},
                           {"walk_ratio_sd", walk_ratio_sd},
                           {"sleep_hours_sd", sleep_hours_sd},
                           {"label_noise", label_noise}})
        require(v >= 0, fmt::format("{} must be >= 0", name));
}

CohortSpec parse_cohort_spec_text(std::string_view text) {
    CohortSpec spec;
    auto fields = fields_of(spec);
    std::set<std::string, std::less<>> seen;
    std::size_t lineno = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw InvalidSpec(fmt::format("line {}: expected key = value", lineno));
        std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        auto it = std::find_if(fields.begin(), fields.end(), [&](const Field& f) { return f.key == key; });
        if (it == fields.end()) throw InvalidSpec(fmt::format("line {}: unknown key '{}'", lineno, key));
        if (!seen.insert(key).second) throw InvalidSpec(fmt::format("line {}: duplicate key '{}'", lineno, key));
        if (it->d) *it->d = parse_number<double>(value, key);
        if (it->i) *it->i = parse_number<int>(value, key);
        if (it->u) *it->u = parse_number<std::uint64_t>(value, key);
    }
    spec.validate();
    return spec;
}

CohortSpec parse_cohort_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidSpec("cannot open spec file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_cohort_spec_text(ss.str());
}

std::string format_cohort_spec(const CohortSpec& spec) {
    CohortSpec copy = spec;
    std::string out;
    for (const auto& f : fields_of(copy)) {
        if (f.d) out += fmt::format("{} = {}\n", f.key, *f.d);
        if (f.i) out += fmt::format("{} = {}\n", f.key, *f.i);
        if (f.u) out += fmt::format("{} = {}\n", f.key, *f.u);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

struct HubLayout {
    std::vector<std::string> ns{"ns-01", "ns-02"};
    std::vector<std::string> pat{"pat-01", "pat-02", "pat-03", "pat-04", "pat-05", "pat-06"};
    std::vector<std::string> loungemed{"lounge-01", "med-01"};
    std::vector<std::string> all;

    HubLayout() {
        for (const auto* group : {&ns, &pat, &loungemed}) all.insert(all.end(), group->begin(), group->end());
        std::sort(all.begin(), all.end());
    }

    const std::vector<std::string>& of(Location l) const {
        switch (l) {
            case Location::NursingStation: return ns;
            case Location::PatientRoom: return pat;
            default: return loungemed;
        }
    }
};

const HubLayout& layout() {
    static const HubLayout l;
    return l;
}

const ShiftDate kFirstDate = ShiftDate::parse("2018-03-05");

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return u_(rng_); }
    double uniform(double a, double b) { return a + (b - a) * u_(rng_); }
    double normal(double mu, double sd) { return mu + sd * n_(rng_); }
    bool bernoulli(double p) { return u_(rng_) < p; }
    int geometric_half() {
        int k = 0;
        while (u_(rng_) < 0.5) ++k;
        return k;
    }
    std::size_t index(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(u_(rng_) * static_cast<double>(n))); }
    std::size_t pick(const Occupancy& p) {
        double u = u_(rng_), acc = 0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            acc += p[k];
            if (u < acc) return k;
        }
        return p.size() - 1;
    }

private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> u_{0.0, 1.0};
    std::normal_distribution<double> n_{0.0, 1.0};
};

// Occupancy index order follows kAllLocations: ns, pat, loungemed, outside.
constexpr std::array<Location, 4> kOccupancyOrder{Location::NursingStation, Location::PatientRoom,
                                                  Location::LoungeMed, Location::OutsideUnit};

struct SpeakerVoice {
    std::array<double, 3> mu{};
    std::array<double, 3> sd{};
};

FeatureFrame make_frame(Draw& d, const SpeakerVoice& v, const std::array<double, 3>& offset, double fg_fraction,
                        double voiced_fraction) {
    FeatureFrame f;
    bool fg = d.bernoulli(fg_fraction);
    bool voiced = d.bernoulli(voiced_fraction);
    double pitch = d.normal(v.mu[0] + offset[0] * v.sd[0], v.sd[0]);
    if (voiced) f.log_pitch = round3(pitch);
    f.intensity = round3(d.normal(v.mu[1] + offset[1] * v.sd[1], v.sd[1]));
    f.hf_lf_ratio = std::max(0.0, round3(d.normal(v.mu[2] + offset[2] * v.sd[2], v.sd[2])));
    f.foreground_prob = fg ? round3(d.uniform(0.5, 1.0)) : round3(d.uniform(0.0, 0.49));
    return f;
}

int clamp_rssi(double x) { return std::clamp(static_cast<int>(std::lround(x)), kRssiMin, kRssiMax); }

}  // namespace

HubTable simulated_hubs() {
    std::vector<HubRecord> records;
    for (const auto& id : layout().all) {
        HubCategory c = id.starts_with("ns")       ? HubCategory::NursingStation
                        : id.starts_with("pat")    ? HubCategory::PatientRoom
                        : id.starts_with("lounge") ? HubCategory::Lounge
                                                   : HubCategory::MedicineRoom;
        records.push_back({id, c});
    }
    return HubTable(std::move(records));
}

std::size_t cohort_size(const CohortSpec& spec) { return 4 * static_cast<std::size_t>(spec.n_per_cell); }

SimulatedParticipant generate_participant(const CohortSpec& spec, std::size_t index) {
    const std::size_t cell = index / static_cast<std::size_t>(spec.n_per_cell);
    const ShiftType shift = cell < 2 ? ShiftType::Day : ShiftType::Night;
    const UnitType unit = cell % 2 == 0 ? UnitType::ICU : UnitType::NonICU;
    const auto s = static_cast<std::size_t>(shift == ShiftType::Night);
    const Occupancy& occ = unit == UnitType::ICU ? spec.occupancy_icu : spec.occupancy_non_icu;
    Draw d(splitmix64(spec.seed ^ splitmix64(index + 1)));

    SimulatedParticipant out;
    ParticipantTruth& truth = out.truth;
    truth.participant_id = fmt::format("P{:05d}", index + 1);
    truth.shift_type = shift;
    truth.unit_type = unit;
    bool is_short = d.bernoulli(spec.short_participant_fraction);
    truth.n_shifts = is_short ? std::min(spec.short_participant_shifts, spec.n_shifts) : spec.n_shifts;
    truth.passes_min_days = truth.n_shifts >= 5;
    truth.trait_pos = d.normal(0, 1);
    truth.trait_neg = d.normal(0, 1);
    truth.trait_sleep = d.normal(0, 1);
    truth.inter_session_median = spec.inter_session[s] * std::exp(d.normal(0, spec.interaction_rate_sd));
    truth.gt1min_ratio = spec.gt1min[s];
    truth.p_high = std::clamp(spec.arousal_pos_base + spec.arousal_trait_scale * truth.trait_pos, 0.0, 1.0);
    truth.p_low = std::clamp(spec.arousal_neg_base + spec.arousal_trait_scale * truth.trait_neg, 0.0, 1.0 - truth.p_high);

    SpeakerVoice voice;
    voice.mu = {d.normal(5.3, 0.15), d.normal(60.0, 3.0), d.normal(1.0, 0.1)};
    voice.sd = {0.12, 4.0, 0.2};
    SpeakerVoice ambient = voice;
    ambient.mu = {voice.mu[0] + 0.3, voice.mu[1] - 6.0, voice.mu[2]};

    const double walk_mean = std::clamp(d.normal(spec.walk_ratio[s], spec.walk_ratio_sd), 0.02, 0.98);
    const double sleep_mean = spec.sleep_hours[s] + spec.sleep_trait_scale * truth.trait_sleep;

    ParticipantProfile& profile = out.input.profile;
    profile.participant_id = truth.participant_id;
    profile.shift_type = shift;
    profile.unit_type = unit;
    profile.pos_affect = std::clamp(
        static_cast<int>(std::lround(32 + spec.label_pos_coupling * truth.trait_pos + d.normal(0, spec.label_noise))),
        10, 50);
    profile.neg_affect = std::clamp(
        static_cast<int>(std::lround(20 + spec.label_neg_coupling * truth.trait_neg + d.normal(0, spec.label_noise))),
        10, 50);
    double swls = 4.8 + spec.label_swls_coupling * truth.trait_sleep + d.normal(0, spec.label_noise / 4);
    profile.life_satisfaction = std::clamp(std::round(swls * 5) / 5, 1.0, 7.0);

    const double window_pos = std::clamp(truth.p_high + spec.arousal_pos_shift[s], 0.0, 1.0);
    const double window_neg = std::clamp(truth.p_low + spec.arousal_neg_shift[s], 0.0, 1.0 - window_pos);
    const double mu = truth.inter_session_median;
    const auto& hubs = layout();
    const ShiftDate start = kFirstDate.plus_days(static_cast<int>(index % 7));

    for (int k = 0; k < truth.n_shifts; ++k) {
        const ShiftDate date = start.plus_days(k + k / 3);
        const int length = kShiftMinutes + (d.bernoulli(spec.out_of_window_rate) ? 1 + static_cast<int>(d.index(30)) : 0);

        // Room occupancy and the RSSI it produces, minute by minute.
        std::size_t room = d.pick(occ);
        std::string hub = room < 3 ? hubs.of(kOccupancyOrder[room])[d.index(hubs.of(kOccupancyOrder[room]).size())] : "";
        for (int m = 0; m < length; ++m) {
            if (m > 0 && !d.bernoulli(spec.room_stay_prob)) {
                std::size_t next = d.pick(occ);
                if (next != room && next < 3) {
                    const auto& pool = hubs.of(kOccupancyOrder[next]);
                    hub = pool[d.index(pool.size())];
                }
                room = next;
            }
            if (room < 3) {
                out.input.rssi.push_back({profile.participant_id, date, m, hub, clamp_rssi(d.normal(170, 6))});
                std::string other = hubs.all[d.index(hubs.all.size())];
                if (other != hub)
                    out.input.rssi.push_back({profile.participant_id, date, m, other, clamp_rssi(d.normal(152, 6))});
            } else {
                const auto& far = hubs.all[d.index(hubs.all.size())];
                out.input.rssi.push_back({profile.participant_id, date, m, far, clamp_rssi(d.normal(140, 3))});
            }
        }

        // Renewal process of speech sessions with ambient recordings in the gaps.
        int t = static_cast<int>(d.index(static_cast<std::size_t>(std::max(1.0, std::round(mu)))));
        while (t < length) {
            int duration = d.bernoulli(truth.gt1min_ratio) ? 2 + d.geometric_half() : 1;
            for (int m = t; m < std::min(t + duration, length); ++m) {
                int block = std::min(m / kBlockMinutes, kBlocksPerShift - 1);
                bool in_window = block >= spec.arousal_window_start && block <= spec.arousal_window_end;
                double ph = in_window ? window_pos : truth.p_high;
                double pl = in_window ? window_neg : truth.p_low;
                double u = d.uniform();
                double state = u < ph ? spec.arousal_offset_sd : u < ph + pl ? -spec.arousal_offset_sd : 0.0;
                std::array<double, 3> offset{};
                for (auto& o : offset) o = state + d.normal(0, 0.12);
                RecordingSegment rec{profile.participant_id, date, m, {}};
                rec.frames.reserve(static_cast<std::size_t>(spec.frames_per_recording));
                for (int f = 0; f < spec.frames_per_recording; ++f)
                    rec.frames.push_back(make_frame(d, voice, offset, spec.foreground_fraction, spec.voiced_fraction));
                out.input.recordings.push_back(std::move(rec));
            }
            int gap = std::max(1, static_cast<int>(std::lround(d.normal(mu, spec.inter_session_cv * mu))));
            for (int m = t + duration; m < std::min(t + duration + gap, length); ++m) {
                if (!d.bernoulli(spec.background_rate)) continue;
                RecordingSegment rec{profile.participant_id, date, m, {}};
                for (int f = 0; f < spec.frames_per_recording; ++f)
                    rec.frames.push_back(
                        make_frame(d, ambient, {}, spec.background_foreground_fraction, spec.voiced_fraction));
                out.input.recordings.push_back(std::move(rec));
            }
            t += duration + gap;
        }

        DailyPhysiology phys;
        phys.participant_id = profile.participant_id;
        phys.shift_date = date;
        phys.walk_ratio = std::clamp(round3(d.normal(walk_mean, 0.04)), 0.0, 1.0);
        phys.sleep_hours = std::clamp(round3(d.normal(sleep_mean, spec.sleep_hours_sd)), 0.0, 24.0);
        out.input.physiology.push_back(phys);
    }
    return out;
}

namespace {

GroundTruth truth_header(const CohortSpec& spec) {
    GroundTruth g;
    g.spec = spec;
    if (spec.inter_session[0] != spec.inter_session[1]) g.shift_features.push_back("inter_session_time_mean");
    if (spec.gt1min[0] != spec.gt1min[1]) g.shift_features.push_back("gt1min_ratio_all_mean");
    if (spec.arousal_pos_shift[0] != spec.arousal_pos_shift[1]) g.shift_features.push_back("pos_arousal_all_mean");
    if (spec.arousal_neg_shift[0] != spec.arousal_neg_shift[1]) g.shift_features.push_back("neg_arousal_all_mean");
    if (spec.walk_ratio[0] != spec.walk_ratio[1]) g.shift_features.push_back("walk_ratio_mean");
    if (spec.sleep_hours[0] != spec.sleep_hours[1]) g.shift_features.push_back("sleep_hours_mean");
    const std::array<const char*, 4> occ_names{"occupancy_ns_mean", "occupancy_pat_mean", "occupancy_loungemed_mean",
                                               "occupancy_outside_mean"};
    for (std::size_t k = 0; k < 4; ++k)
        if (std::abs(spec.occupancy_icu[k] - spec.occupancy_non_icu[k]) > 1e-12) g.unit_features.push_back(occ_names[k]);
    if (spec.arousal_trait_scale > 0 && spec.label_pos_coupling != 0) g.label_features[0].push_back("pos_arousal_all_mean");
    if (spec.arousal_trait_scale > 0 && spec.label_neg_coupling != 0) g.label_features[1].push_back("neg_arousal_all_mean");
    if (spec.sleep_trait_scale > 0 && spec.label_swls_coupling != 0) g.label_features[2].push_back("sleep_hours_mean");
    return g;
}

std::size_t chunk_size() { return std::max<std::size_t>(4, 2 * static_cast<std::size_t>(omp_get_max_threads())); }

}  // namespace

Cohort generate_cohort(const CohortSpec& spec, GroundTruth* truth) {
    spec.validate();
    const std::size_t n = cohort_size(spec);
    std::vector<SimulatedParticipant> parts(n);
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < static_cast<long>(n); ++k)
        parts[static_cast<std::size_t>(k)] = generate_participant(spec, static_cast<std::size_t>(k));

    Cohort c;
    c.hubs = simulated_hubs();
    GroundTruth g = truth_header(spec);
    for (auto& p : parts) {
        c.profiles.push_back(p.input.profile);
        std::move(p.input.recordings.begin(), p.input.recordings.end(), std::back_inserter(c.recordings));
        std::move(p.input.rssi.begin(), p.input.rssi.end(), std::back_inserter(c.rssi));
        std::move(p.input.physiology.begin(), p.input.physiology.end(), std::back_inserter(c.physiology));
        g.participants.push_back(p.truth);
    }
    if (truth) *truth = std::move(g);
    return c;
}

GroundTruth generate(const CohortSpec& spec, const std::filesystem::path& out_dir) {
    spec.validate();
    std::filesystem::create_directories(out_dir);
    const std::size_t n = cohort_size(spec);
    GroundTruth g = truth_header(spec);
    std::vector<ParticipantProfile> profiles;

    std::ofstream rssi(out_dir / files::kRssi, std::ios::binary);
    std::ofstream recs(out_dir / files::kRecordings, std::ios::binary);
    std::ofstream phys(out_dir / files::kPhysiology, std::ios::binary);
    if (!rssi || !recs || !phys) throw Error("cannot write into " + out_dir.string());
    rssi << rssi_header() << '\n';
    phys << physiology_header() << '\n';

    struct Buffered {
        ParticipantProfile profile;
        ParticipantTruth truth;
        std::string rssi, recordings, physiology;
    };
    const std::size_t chunk = chunk_size();
    for (std::size_t base = 0; base < n; base += chunk) {
        const std::size_t len = std::min(chunk, n - base);
        std::vector<Buffered> buf(len);
#pragma omp parallel for schedule(dynamic)
        for (long k = 0; k < static_cast<long>(len); ++k) {
            auto& b = buf[static_cast<std::size_t>(k)];
            auto p = generate_participant(spec, base + static_cast<std::size_t>(k));
            for (const auto& o : p.input.rssi) (b.rssi += format_rssi_row(o)) += '\n';
            for (const auto& r : p.input.recordings) (b.recordings += format_recording_json(r)) += '\n';
            for (const auto& x : p.input.physiology) (b.physiology += format_physiology_row(x)) += '\n';
            b.profile = std::move(p.input.profile);
            b.truth = std::move(p.truth);
        }
        for (auto& b : buf) {
            rssi << b.rssi;
            recs << b.recordings;
            phys << b.physiology;
            profiles.push_back(std::move(b.profile));
            g.participants.push_back(std::move(b.truth));
        }
    }
    write_participants(out_dir / files::kParticipants, profiles);
    write_hubs(out_dir / files::kHubs, simulated_hubs());
    write_ground_truth(out_dir / "ground_truth.json", g);
    return g;
}

// ---------------------------------------------------------------------------
// Ground truth file
// ---------------------------------------------------------------------------

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth) {
    json spec = json::object();
    CohortSpec copy = truth.spec;
    for (const auto& f : fields_of(copy)) {
        if (f.d) spec[f.key] = *f.d;
        if (f.i) spec[f.key] = *f.i;
        if (f.u) spec[f.key] = *f.u;
    }
    json parts = json::array();
    for (const auto& p : truth.participants)
        parts.push_back({{"participant_id", p.participant_id},
                         {"shift_type", to_string(p.shift_type)},
                         {"unit_type", to_string(p.unit_type)},
                         {"n_shifts", p.n_shifts},
                         {"passes_min_days", p.passes_min_days},
                         {"inter_session_median", p.inter_session_median},
                         {"gt1min_ratio", p.gt1min_ratio},
                         {"trait_pos", p.trait_pos},
                         {"trait_neg", p.trait_neg},
                         {"trait_sleep", p.trait_sleep},
                         {"p_high", p.p_high},
                         {"p_low", p.p_low}});
    json labels = json::object();
    for (std::size_t k = 0; k < kLabelNames.size(); ++k) labels[kLabelNames[k]] = truth.label_features[k];
    json j{{"spec", spec},
           {"participants", parts},
           {"shift_features", truth.shift_features},
           {"unit_features", truth.unit_features},
           {"label_features", labels}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        json j = json::parse(in);
        GroundTruth g;
        std::string text;
        for (const auto& [k, v] : j.at("spec").items()) text += k + " = " + v.dump() + "\n";
        g.spec = parse_cohort_spec_text(text);
        for (const auto& p : j.at("participants")) {
            ParticipantTruth t;
            t.participant_id = p.at("participant_id").get<std::string>();
            t.shift_type = parse_shift_type(p.at("shift_type").get<std::string>());
            t.unit_type = parse_unit_type(p.at("unit_type").get<std::string>());
            t.n_shifts = p.at("n_shifts").get<int>();
            t.passes_min_days = p.at("passes_min_days").get<bool>();
            t.inter_session_median = p.at("inter_session_median").get<double>();
            t.gt1min_ratio = p.at("gt1min_ratio").get<double>();
            t.trait_pos = p.at("trait_pos").get<double>();
            t.trait_neg = p.at("trait_neg").get<double>();
            t.trait_sleep = p.at("trait_sleep").get<double>();
            t.p_high = p.at("p_high").get<double>();
            t.p_low = p.at("p_low").get<double>();
            g.participants.push_back(std::move(t));
        }
        g.shift_features = j.at("shift_features").get<std::vector<std::string>>();
        g.unit_features = j.at("unit_features").get<std::vector<std::string>>();
        for (std::size_t k = 0; k < kLabelNames.size(); ++k)
            g.label_features[k] = j.at("label_features").at(kLabelNames[k]).get<std::vector<std::string>>();
        return g;
    } catch (const InvalidSpec&) {
        throw;
    } catch (const std::exception& e) {
        throw MalformedRow(path.filename().string(), 0, e.what());
    }
}

// ---------------------------------------------------------------------------
// In-memory generate + extract
// ---------------------------------------------------------------------------

ExtractionResult simulate_and_extract(const CohortSpec& spec, const ExtractionConfig& config, GroundTruth* truth) {
    spec.validate();
    const std::size_t n = cohort_size(spec);
    const HubTable hubs = simulated_hubs();
    std::vector<std::optional<ParticipantResult>> results(n);
    std::vector<ParticipantProfile> profiles(n);
    std::vector<ParticipantTruth> truths(n);
    std::vector<std::size_t> dropped(n, 0);

#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(n); ++i) {
        const auto k = static_cast<std::size_t>(i);
        auto p = generate_participant(spec, k);
        std::set<ShiftDate> days;
        for (const auto& r : p.input.recordings) {
            if (r.minute_index < 0 || r.minute_index >= kShiftMinutes) {
                ++dropped[k];
                continue;
            }
            auto fg = std::count_if(r.frames.begin(), r.frames.end(), [&](const FeatureFrame& f) { return config.filter(f); });
            if (fg >= config.min_frames) days.insert(r.shift_date);
        }
        if (static_cast<int>(days.size()) >= config.min_days) results[k] = extract_participant(p.input, hubs, config);
        profiles[k] = std::move(p.input.profile);
        truths[k] = std::move(p.truth);
    }

    ExtractionResult res;
    std::vector<ParticipantProfile> kept;
    for (std::size_t k = 0; k < n; ++k) {
        res.dropped_recordings += dropped[k];
        if (!results[k]) {
            ++res.removed_participants;
            continue;
        }
        res.participants.push_back(std::move(*results[k]));
        kept.push_back(profiles[k]);
    }
    if (truth) {
        *truth = truth_header(spec);
        truth->participants = std::move(truths);
    }
    if (res.participants.empty()) throw EmptyCohort("no participant passes the filters");
    res.table = assemble_table(res.participants, kept);
    return res;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

namespace {

std::optional<double> group_median(const FeatureTable& t, std::string_view feature, const std::vector<int>& group,
                                   int level) {
    auto j = t.column_index(feature);
    if (!j) return std::nullopt;
    std::vector<double> v;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (group[i] == level) v.push_back(t.rows[i][*j]);
    if (v.empty()) return std::nullopt;
    return stats::median(v);
}

RecoveryCheck make_check(std::string quantity, std::string group, double planted, double recovered) {
    double err = planted != 0 ? std::abs(recovered - planted) / std::abs(planted) : std::abs(recovered - planted);
    return {std::move(quantity), std::move(group), planted, recovered, err};
}

std::vector<FlagCheck> flag_checks(const FeatureTable& t, GroupFactor factor, const std::vector<std::string>& planted) {
    std::vector<FlagCheck> out;
    try {
        auto groups = assign_groups(t, factor);
        for (const auto& row : compare_groups(t, groups, t.columns)) {
            bool is_planted = std::find(planted.begin(), planted.end(), row.feature) != planted.end();
            out.push_back({row.feature, is_planted, row.significant, row.result.p_value});
        }
    } catch (const EmptyGroup&) {
    }
    return out;
}

}  // namespace

VerificationReport verify_against_truth(const FeatureTable& table, const GroundTruth& truth,
                                        const ReportSummary* report, std::size_t top_k) {
    const CohortSpec& spec = truth.spec;
    VerificationReport v;

    auto shift = assign_groups(table, GroupFactor::Shift).group;
    auto unit = assign_groups(table, GroupFactor::Unit).group;
    const std::array<const char*, 2> shift_names{"day", "night"};
    const std::array<const char*, 2> unit_names{"icu", "non_icu"};

    for (int s = 0; s < 2; ++s) {
        if (auto m = group_median(table, "inter_session_time_mean", shift, s))
            v.recovery.push_back(make_check("inter_session_time_median", shift_names[s], spec.inter_session[s], *m));
        if (auto m = group_median(table, "gt1min_ratio_all_mean", shift, s))
            v.recovery.push_back(make_check("gt1min_ratio_median", shift_names[s], spec.gt1min[s], *m));
        if (auto m = group_median(table, "walk_ratio_mean", shift, s))
            v.recovery.push_back(make_check("walk_ratio_median", shift_names[s], spec.walk_ratio[s], *m));
        if (auto m = group_median(table, "sleep_hours_mean", shift, s))
            v.recovery.push_back(make_check("sleep_hours_median", shift_names[s], spec.sleep_hours[s], *m));
    }
    const std::array<const char*, 4> occ{"occupancy_ns_mean", "occupancy_pat_mean", "occupancy_loungemed_mean",
                                         "occupancy_outside_mean"};
    for (int u = 0; u < 2; ++u) {
        const Occupancy& planted = u == 0 ? spec.occupancy_icu : spec.occupancy_non_icu;
        for (std::size_t k = 0; k < 4; ++k)
            if (auto m = group_median(table, occ[k], unit, u))
                v.recovery.push_back(make_check(std::string(occ[k]).substr(0, std::string(occ[k]).size() - 5) + "_median",
                                                unit_names[u], planted[k], *m));
    }
    for (auto [feature, shifts] : {std::pair{"pos_arousal_all_mean", &spec.arousal_pos_shift},
                                   std::pair{"neg_arousal_all_mean", &spec.arousal_neg_shift}}) {
        auto day = group_median(table, feature, shift, 0);
        auto night = group_median(table, feature, shift, 1);
        if (day && night) {
            std::string q = std::string(feature).substr(0, 11) + "_night_minus_day";
            v.recovery.push_back(make_check(q, "night-day", (*shifts)[1] - (*shifts)[0], *night - *day));
        }
    }

    v.shift_flags = flag_checks(table, GroupFactor::Shift, truth.shift_features);
    v.unit_flags = flag_checks(table, GroupFactor::Unit, truth.unit_features);

    if (report) {
        v.label = report->label;
        for (std::size_t k = 0; k < std::min(top_k, report->importances.size()); ++k)
            v.top_features.push_back(report->importances[k].feature);
        auto it = std::find(kLabelNames.begin(), kLabelNames.end(), report->label);
        if (it != kLabelNames.end()) {
            for (const auto& f : truth.label_features[static_cast<std::size_t>(it - kLabelNames.begin())]) {
                bool in_top = std::find(v.top_features.begin(), v.top_features.end(), f) != v.top_features.end();
                (in_top ? v.planted_in_top : v.planted_missing).push_back(f);
            }
        }
    }
    return v;
}

void write_verification_json(const std::filesystem::path& path, const VerificationReport& report) {
    json rec = json::array();
    for (const auto& r : report.recovery)
        rec.push_back({{"quantity", r.quantity},
                       {"group", r.group},
                       {"planted", r.planted},
                       {"recovered", r.recovered},
                       {"relative_error", r.relative_error}});
    auto flags = [](const std::vector<FlagCheck>& v) {
        json arr = json::array();
        for (const auto& f : v)
            arr.push_back({{"feature", f.feature}, {"planted", f.planted}, {"flagged", f.flagged}, {"p", f.p_value}});
        return arr;
    };
    json j{{"recovery", rec}, {"shift_flags", flags(report.shift_flags)}, {"unit_flags", flags(report.unit_flags)}};
    if (!report.label.empty())
        j["importance"] = {{"label", report.label},
                           {"top_features", report.top_features},
                           {"planted_in_top", report.planted_in_top},
                           {"planted_missing", report.planted_missing}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace shiftspeech
