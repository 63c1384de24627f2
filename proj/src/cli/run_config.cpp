#include "hnl/cli/run_config.hpp"

#include "hnl/core/error.hpp"
#include "hnl/core/json_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hnl::cli {
namespace {

using nlohmann::json;

std::size_t get_count(const json& j, const char* key, std::size_t fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError("field '" + field_path(path, key) + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

std::vector<std::size_t> get_layers(const json& j, const char* key, std::vector<std::size_t> fallback,
                                    const std::string& path) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_array()) throw ConfigError("field '" + field_path(path, key) + "' must be an array of widths");
    std::vector<std::size_t> out;
    for (const auto& e : v) {
        if (!e.is_number_integer() || e.get<long long>() <= 0) {
            throw ConfigError("field '" + field_path(path, key) + "' must hold positive integers");
        }
        out.push_back(e.get<std::size_t>());
    }
    return out;
}

double get_positive(const json& j, const char* key, double fallback, const std::string& path) {
    const double v = json_get_or<double>(j, key, fallback, path);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("field '" + field_path(path, key) + "' must be positive");
    return v;
}

forecast::TrainConfig parse_train(const json& j, forecast::TrainConfig c, const std::string& path) {
    reject_unknown_keys(j, {"learning_rate", "batch_size", "max_epochs", "patience"}, path);
    c.learning_rate = get_positive(j, "learning_rate", c.learning_rate, path);
    c.batch_size = get_count(j, "batch_size", c.batch_size, path);
    c.max_epochs = get_count(j, "max_epochs", c.max_epochs, path);
    c.patience = get_count(j, "patience", c.patience, path);
    if (c.batch_size == 0) throw ConfigError("field '" + field_path(path, "batch_size") + "' must be positive");
    return c;
}

DatasetConfig parse_dataset(const std::string& name, const json& j, const std::filesystem::path& base,
                            const std::string& path) {
    DatasetConfig d;
    d.name = name;
    d.source = json_get<std::string>(j, "source", path);
    if (d.source == "synthetic") {
        reject_unknown_keys(j,
                            {"source", "kind", "days", "resolution", "seed", "base", "daily_amplitude",
                             "weekly_amplitude", "noise_std", "capacity"},
                            path);
        auto& s = d.synthetic;
        try {
            s.kind = data::parse_energy_kind(json_get<std::string>(j, "kind", path));
        } catch (const ValidationError& e) {
            throw ConfigError(field_path(path, "kind") + ": " + e.what());
        }
        s.days = static_cast<int>(get_count(j, "days", static_cast<std::size_t>(s.days), path));
        s.resolution = get_positive(j, "resolution", s.resolution, path);
        s.seed = get_count(j, "seed", s.seed, path);
        s.base = json_get_or<double>(j, "base", s.base, path);
        s.daily_amplitude = json_get_or<double>(j, "daily_amplitude", s.daily_amplitude, path);
        s.weekly_amplitude = json_get_or<double>(j, "weekly_amplitude", s.weekly_amplitude, path);
        s.noise_std = json_get_or<double>(j, "noise_std", s.noise_std, path);
        s.capacity = get_positive(j, "capacity", s.capacity, path);
        if (s.days < 2) throw ConfigError("field '" + field_path(path, "days") + "' must be at least 2");
    } else if (d.source == "csv") {
        reject_unknown_keys(j, {"source", "path", "timestamp_column", "value_column", "missing", "max_gap"}, path);
        d.path = json_get<std::string>(j, "path", path);
        if (d.path.is_relative()) d.path = base / d.path;
        d.schema.timestamp_column = json_get_or<std::string>(j, "timestamp_column", "timestamp", path);
        d.schema.value_column = json_get_or<std::string>(j, "value_column", "value", path);
        const auto missing = json_get_or<std::string>(j, "missing", "interpolate", path);
        if (missing == "interpolate") {
            d.schema.missing = data::MissingPolicy::interpolate;
        } else if (missing == "error") {
            d.schema.missing = data::MissingPolicy::error;
        } else {
            throw ConfigError("field '" + field_path(path, "missing") + "' must be interpolate or error");
        }
        d.schema.max_gap = get_count(j, "max_gap", d.schema.max_gap, path);
    } else {
        throw ConfigError("field '" + field_path(path, "source") + "' must be synthetic or csv, got '" + d.source +
                          "'");
    }
    return d;
}

ModelConfig parse_model(const json& j, const RunConfig& rc, const std::string& path) {
    ModelConfig m;
    m.name = json_get<std::string>(j, "name", path);
    const auto kind = json_get<std::string>(j, "kind", path);
    try {
        m.kind = parse_model_kind(kind);
    } catch (const ConfigError&) {
        throw ConfigError("field '" + field_path(path, "kind") + "': unknown model '" + kind +
                          "' (expected hnl, nl, direct or persistence)");
    }
    if (m.name.empty() || m.name.find_first_of("/\\ ,") != std::string::npos || m.name == "perfect") {
        throw ConfigError("field '" + field_path(path, "name") + "' must be a plain identifier other than 'perfect'");
    }
    switch (m.kind) {
        case ModelKind::hnl:
        case ModelKind::nl:
            reject_unknown_keys(j,
                                {"name", "kind", "T", "gamma", "anchors", "d_h", "encoder_hidden", "decoder_hidden",
                                 "frequency", "train"},
                                path);
            break;
        case ModelKind::direct:
            reject_unknown_keys(j, {"name", "kind", "hidden", "train"}, path);
            break;
        case ModelKind::persistence:
            reject_unknown_keys(j, {"name", "kind"}, path);
            break;
    }
    auto& h = m.hnl;
    h.resolutions = rc.ladder;
    h.T = get_positive(j, "T", rc.horizon_hours, path);
    h.gamma = json_get_or<double>(j, "gamma", 0.0, path);
    if (h.gamma < 0.0) throw ConfigError("field '" + field_path(path, "gamma") + "' must be non-negative");
    h.anchors = json_get_or<std::vector<int>>(j, "anchors", {}, path);
    if (m.kind == ModelKind::hnl && !h.anchors.empty() && h.anchors.size() != rc.ladder.size()) {
        throw ConfigError("field '" + field_path(path, "anchors") + "' needs one anchor per ladder level");
    }
    h.d_h = get_count(j, "d_h", h.d_h, path);
    if (h.d_h == 0) throw ConfigError("field '" + field_path(path, "d_h") + "' must be positive");
    h.encoder_hidden = get_layers(j, "encoder_hidden", h.encoder_hidden, path);
    h.decoder_hidden = get_layers(j, "decoder_hidden", h.decoder_hidden, path);
    if (j.contains("frequency")) {
        if (m.kind != ModelKind::nl) throw ConfigError("field '" + field_path(path, "frequency") + "' applies to nl only");
        const auto n = get_count(j, "frequency", 33, path);
        if (n == 0) throw ConfigError("field '" + field_path(path, "frequency") + "' must be positive");
        m.nl_frequency = static_cast<int>(n);
    }
    m.hidden = get_layers(j, "hidden", m.hidden, path);
    if (j.contains("train")) m.train = parse_train(j.at("train"), m.train, field_path(path, "train"));
    if (2.0 * h.T < rc.horizon_hours) {
        throw ConfigError("field '" + field_path(path, "T") + "': the horizon must fit in [0, 2T)");
    }
    return m;
}

ScheduleConfig parse_schedule(const json& j, const std::string& path) {
    reject_unknown_keys(j, {"max_days", "coordinations", "penetration", "load_dataset", "wind_dataset", "window_hours"},
                        path);
    ScheduleConfig s;
    s.max_days = get_count(j, "max_days", s.max_days, path);
    s.coordinations = json_get_or(j, "coordinations", s.coordinations, path);
    s.penetration = json_get_or(j, "penetration", s.penetration, path);
    for (double p : s.penetration) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw ConfigError("field '" + field_path(path, "penetration") + "' must hold positive fractions");
        }
    }
    s.load_dataset = json_get_or<std::string>(j, "load_dataset", s.load_dataset, path);
    s.wind_dataset = json_get_or<std::string>(j, "wind_dataset", s.wind_dataset, path);
    s.window_hours = get_positive(j, "window_hours", s.window_hours, path);
    return s;
}

ToyConfig parse_toy(const json& j, const std::string& path) {
    reject_unknown_keys(j,
                        {"T", "resolution", "history_units", "train_windows", "val_windows", "noise_std",
                         "frequencies", "d_h", "encoder_hidden", "decoder_hidden", "train", "seed", "large_decoder",
                         "large_days", "large_train"},
                        path);
    ToyConfig t;
    t.T = get_positive(j, "T", t.T, path);
    t.resolution = get_positive(j, "resolution", t.resolution, path);
    t.history_units = get_positive(j, "history_units", t.history_units, path);
    t.train_windows = get_count(j, "train_windows", t.train_windows, path);
    t.val_windows = get_count(j, "val_windows", t.val_windows, path);
    t.noise_std = json_get_or<double>(j, "noise_std", t.noise_std, path);
    t.frequencies = json_get_or(j, "frequencies", t.frequencies, path);
    for (int n : t.frequencies) {
        if (n <= 0) throw ConfigError("field '" + field_path(path, "frequencies") + "' must hold positive integers");
    }
    t.d_h = get_count(j, "d_h", t.d_h, path);
    t.encoder_hidden = get_layers(j, "encoder_hidden", t.encoder_hidden, path);
    t.decoder_hidden = get_layers(j, "decoder_hidden", t.decoder_hidden, path);
    if (j.contains("train")) t.train = parse_train(j.at("train"), t.train, field_path(path, "train"));
    t.train.seed = get_count(j, "seed", t.train.seed, path);
    t.large_decoder = json_get_or<bool>(j, "large_decoder", t.large_decoder, path);
    t.large_days = static_cast<int>(get_count(j, "large_days", static_cast<std::size_t>(t.large_days), path));
    if (j.contains("large_train")) {
        t.large_train = parse_train(j.at("large_train"), t.large_train, field_path(path, "large_train"));
    }
    if (t.train_windows == 0 || t.val_windows == 0 || t.d_h == 0) {
        throw ConfigError(path + ": window counts and d_h must be positive");
    }
    if (t.large_days < 10) throw ConfigError("field '" + field_path(path, "large_days") + "' must be at least 10");
    return t;
}

}  // namespace

const char* kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::hnl: return "hnl";
        case ModelKind::nl: return "nl";
        case ModelKind::direct: return "direct";
        case ModelKind::persistence: return "persistence";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& s) {
    for (auto k : {ModelKind::hnl, ModelKind::nl, ModelKind::direct, ModelKind::persistence}) {
        if (s == kind_name(k)) return k;
    }
    throw ConfigError("unknown model kind '" + s + "'");
}

const DatasetConfig& RunConfig::dataset(const std::string& name) const {
    for (const auto& d : datasets) {
        if (d.name == name) return d;
    }
    throw ConfigError("no dataset named '" + name + "'");
}

bool RunConfig::has_dataset(const std::string& name) const {
    return std::any_of(datasets.begin(), datasets.end(), [&](const auto& d) { return d.name == name; });
}

const ModelConfig& RunConfig::model(const std::string& name) const {
    for (const auto& m : models) {
        if (m.name == name) return m;
    }
    throw ConfigError("no model named '" + name + "'");
}

RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    reject_unknown_keys(j,
                        {"schema", "experiment", "datasets", "ladder", "window_hours", "horizon_hours",
                         "stride_hours", "split", "models", "reconciliation", "opt_weighting", "seeds", "system",
                         "output", "schedule", "toy"},
                        "");
    const auto schema = json_get<std::string>(j, "schema", "");
    if (schema != kRunSchema) throw ConfigError("field 'schema' must be '" + std::string(kRunSchema) + "'");
    RunConfig rc;
    rc.experiment = json_get_or<std::string>(j, "experiment", rc.experiment, "");
    rc.ladder = json_get_or(j, "ladder", rc.ladder, "");
    if (rc.ladder.empty()) throw ConfigError("field 'ladder' must not be empty");
    for (std::size_t i = 0; i < rc.ladder.size(); ++i) {
        if (!(rc.ladder[i] > 0.0) || (i > 0 && rc.ladder[i] <= rc.ladder[i - 1])) {
            throw ConfigError("field 'ladder' must hold positive resolutions in ascending order");
        }
    }
    rc.window_hours = get_positive(j, "window_hours", rc.window_hours, "");
    rc.horizon_hours = get_positive(j, "horizon_hours", rc.horizon_hours, "");
    rc.stride_hours = get_positive(j, "stride_hours", rc.stride_hours, "");
    if (j.contains("split")) {
        const auto& s = j.at("split");
        reject_unknown_keys(s, {"train", "val"}, "split");
        rc.split.train = json_get_or<double>(s, "train", rc.split.train, "split");
        rc.split.val = json_get_or<double>(s, "val", rc.split.val, "split");
    }
    if (j.contains("datasets")) {
        const auto& ds = j.at("datasets");
        if (!ds.is_object()) throw ConfigError("field 'datasets' must be an object keyed by dataset name");
        for (const auto& [name, dj] : ds.items()) {
            if (name.find_first_of("/\\ ,") != std::string::npos || name.empty()) {
                throw ConfigError("dataset name '" + name + "' must be a plain identifier");
            }
            rc.datasets.push_back(parse_dataset(name, dj, base_dir, "datasets." + name));
        }
    }
    if (j.contains("models")) {
        const auto& ms = j.at("models");
        if (!ms.is_array()) throw ConfigError("field 'models' must be an array");
        std::set<std::string> names;
        for (std::size_t i = 0; i < ms.size(); ++i) {
            auto m = parse_model(ms[i], rc, "models[" + std::to_string(i) + "]");
            if (!names.insert(m.name).second) throw ConfigError("duplicate model name '" + m.name + "'");
            rc.models.push_back(std::move(m));
        }
    }
    rc.reconciliation = json_get_or(j, "reconciliation", rc.reconciliation, "");
    for (const auto& r : rc.reconciliation) {
        if (r != "none" && r != "bu" && r != "opt") {
            throw ConfigError("field 'reconciliation' holds '" + r + "' (expected none, bu or opt)");
        }
    }
    rc.opt_weighting = json_get_or<std::string>(j, "opt_weighting", rc.opt_weighting, "");
    if (rc.opt_weighting != "identity" && rc.opt_weighting != "structural") {
        throw ConfigError("field 'opt_weighting' must be identity or structural");
    }
    if (j.contains("seeds")) {
        const auto& s = j.at("seeds");
        if (!s.is_array() || s.empty()) throw ConfigError("field 'seeds' must be a non-empty array");
        rc.seeds.clear();
        for (const auto& v : s) {
            const bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
            if (!ok) throw ConfigError("field 'seeds' must hold non-negative integers");
            rc.seeds.push_back(v.get<std::uint64_t>());
        }
    }
    if (j.contains("system") && !j.at("system").is_null()) {
        rc.system_path = json_get<std::string>(j, "system", "");
        if (rc.system_path.is_relative()) rc.system_path = base_dir / rc.system_path;
        std::ifstream in(rc.system_path);
        if (!in) throw ConfigError("field 'system': cannot open '" + rc.system_path.string() + "'");
        json sj;
        try {
            sj = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("field 'system': " + rc.system_path.string() + " is not valid JSON: " + e.what());
        }
        rc.system = dispatch::system_from_json(sj);
    } else {
        rc.system = dispatch::default_system();
    }
    if (j.contains("output")) {
        rc.output = json_get<std::string>(j, "output", "");
        if (rc.output.is_relative()) rc.output = base_dir / rc.output;
    }
    if (j.contains("schedule")) rc.schedule = parse_schedule(j.at("schedule"), "schedule");
    if (j.contains("toy")) rc.toy = parse_toy(j.at("toy"), "toy");
    for (const auto& c : rc.schedule.coordinations) {
        if (std::find(rc.reconciliation.begin(), rc.reconciliation.end(), c) == rc.reconciliation.end()) {
            throw ConfigError("field 'schedule.coordinations' holds '" + c + "', which is not in 'reconciliation'");
        }
    }
    return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_run_config(j, path.parent_path());
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    if (!text.empty() && text.back() == ',') throw ConfigError("--seeds: trailing comma");
    while (std::getline(ss, item, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
            throw ConfigError("--seeds: '" + item + "' is not a non-negative integer");
        }
        out.push_back(std::stoull(item));
    }
    if (out.empty()) throw ConfigError("--seeds: empty seed list");
    return out;
}

data::RawSeries load_dataset(const DatasetConfig& d) {
    if (d.source == "csv") return data::load_csv(d.path.string(), d.schema);
    return data::synthesize_energy(d.synthetic);
}

}  // namespace hnl::cli
