#include "spikecal/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "spikecal/errors.hpp"

namespace spikecal {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <class T>
T parse_int(const std::string& key, const std::string& v)
{
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError("config key '" + key + "' expects an integer, got '" + v + "'");
    return out;
}

double parse_real(const std::string& key, const std::string& v)
{
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ConfigError("config key '" + key + "' expects a boolean, got '" + v + "'");
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

struct Key {
    std::string name;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<Key>& keys()
{
    using P = preprocess::PreprocessConfig;
    auto flag = [](std::string name, bool P::*member) {
        return Key{name,
                   [member](RunConfig& c, const std::string& k, const std::string& v) {
                       c.pipeline.preprocess.*member = parse_bool(k, v);
                   },
                   [member](const RunConfig& c) { return bool_str(c.pipeline.preprocess.*member); }};
    };
    static const std::vector<Key> table = {
        {"lab", [](RunConfig& c, auto&, auto& v) { c.lab_path = v; },
         [](const RunConfig& c) { return c.lab_path.string(); }},
        {"field", [](RunConfig& c, auto&, auto& v) { c.field_path = v; },
         [](const RunConfig& c) { return c.field_path.string(); }},
        {"out", [](RunConfig& c, auto&, auto& v) { c.out_dir = v; },
         [](const RunConfig& c) { return c.out_dir.string(); }},
        {"seed", [](RunConfig& c, auto& k, auto& v) { c.smote.seed = parse_int<std::uint64_t>(k, v); },
         [](const RunConfig& c) { return std::to_string(c.smote.seed); }},
        {"input.reflectance_percent", [](RunConfig& c, auto& k, auto& v) { c.reflectance_percent = parse_bool(k, v); },
         [](const RunConfig& c) { return bool_str(c.reflectance_percent); }},
        {"smote.n",
         [](RunConfig& c, auto& k, auto& v) {
             c.smote.n_percent = parse_int<int>(k, v);
             c.smote.validate_amount();
         },
         [](const RunConfig& c) { return std::to_string(c.smote.n_percent); }},
        {"smote.k",
         [](RunConfig& c, auto& k, auto& v) {
             c.smote.k = parse_int<int>(k, v);
             c.smote.validate_amount();
         },
         [](const RunConfig& c) { return std::to_string(c.smote.k); }},
        {"components.min",
         [](RunConfig& c, auto& k, auto& v) { c.pipeline.components.min_p = parse_int<std::size_t>(k, v); },
         [](const RunConfig& c) { return std::to_string(c.pipeline.components.min_p); }},
        {"components.max",
         [](RunConfig& c, auto& k, auto& v) { c.pipeline.components.max_p = parse_int<std::size_t>(k, v); },
         [](const RunConfig& c) { return std::to_string(c.pipeline.components.max_p); }},
        {"mc.reps", [](RunConfig& c, auto& k, auto& v) { c.reps = parse_int<std::size_t>(k, v); },
         [](const RunConfig& c) { return std::to_string(c.reps); }},
        {"mc.threads", [](RunConfig& c, auto& k, auto& v) { c.threads = parse_int<unsigned>(k, v); },
         [](const RunConfig& c) { return std::to_string(c.threads); }},
        {"preprocess.splices",
         [](RunConfig& c, auto& k, auto& v) {
             std::vector<int> out;
             std::istringstream in(v);
             std::string cell;
             while (std::getline(in, cell, ','))
                 out.push_back(parse_int<int>(k, trim(cell)));
             c.pipeline.preprocess.splice_wavelengths_nm = out;
         },
         [](const RunConfig& c) {
             std::string s;
             for (int w : c.pipeline.preprocess.splice_wavelengths_nm)
                 s += (s.empty() ? "" : ",") + std::to_string(w);
             return s;
         }},
        {"preprocess.offset_estimator",
         [](RunConfig& c, auto& k, auto& v) {
             if (v == "slope")
                 c.pipeline.preprocess.offset_estimator = preprocess::OffsetEstimator::SlopeCorrected;
             else if (v == "adjacent")
                 c.pipeline.preprocess.offset_estimator = preprocess::OffsetEstimator::Adjacent;
             else
                 throw ConfigError("config key '" + k + "' expects slope|adjacent, got '" + v + "'");
         },
         [](const RunConfig& c) {
             return c.pipeline.preprocess.offset_estimator == preprocess::OffsetEstimator::Adjacent ? "adjacent"
                                                                                                     : "slope";
         }},
        {"preprocess.trim_lo",
         [](RunConfig& c, auto& k, auto& v) { c.pipeline.preprocess.trim_lo_nm = parse_int<int>(k, v); },
         [](const RunConfig& c) { return std::to_string(c.pipeline.preprocess.trim_lo_nm); }},
        {"preprocess.trim_hi",
         [](RunConfig& c, auto& k, auto& v) { c.pipeline.preprocess.trim_hi_nm = parse_int<int>(k, v); },
         [](const RunConfig& c) { return std::to_string(c.pipeline.preprocess.trim_hi_nm); }},
        flag("preprocess.offset", &P::offset),
        flag("preprocess.trim", &P::trim),
        flag("preprocess.absorbance", &P::absorbance),
        flag("preprocess.ssa", &P::smooth),
        flag("preprocess.normalize", &P::normalize),
        flag("preprocess.derivative", &P::derivative),
        {"ssa.window_len",
         [](RunConfig& c, auto& k, auto& v) { c.pipeline.preprocess.ssa.window_len = parse_int<std::size_t>(k, v); },
         [](const RunConfig& c) { return std::to_string(c.pipeline.preprocess.ssa.window_len); }},
        {"ssa.rank", [](RunConfig& c, auto& k, auto& v) { c.pipeline.preprocess.ssa.rank = parse_int<std::size_t>(k, v); },
         [](const RunConfig& c) { return std::to_string(c.pipeline.preprocess.ssa.rank); }},
        {"ssa.energy_threshold",
         [](RunConfig& c, auto& k, auto& v) {
             if (v.empty() || v == "none")
                 c.pipeline.preprocess.ssa.energy_threshold.reset();
             else
                 c.pipeline.preprocess.ssa.energy_threshold = parse_real(k, v);
         },
         [](const RunConfig& c) {
             const auto& e = c.pipeline.preprocess.ssa.energy_threshold;
             return e ? format_double(*e) : std::string("none");
         }},
        {"pca.fit_on",
         [](RunConfig& c, auto& k, auto& v) {
             if (v == "L")
                 c.pca_fit_on = PcaFitOn::Lab;
             else if (v == "LF")
                 c.pca_fit_on = PcaFitOn::LabAndField;
             else
                 throw ConfigError("config key '" + k + "' expects L|LF, got '" + v + "'");
         },
         [](const RunConfig& c) { return std::string(c.pca_fit_on == PcaFitOn::Lab ? "L" : "LF"); }},
        {"pca.components", [](RunConfig& c, auto& k, auto& v) { c.pca_components = parse_int<std::size_t>(k, v); },
         [](const RunConfig& c) { return std::to_string(c.pca_components); }},
    };
    return table;
}

std::size_t edit_distance(const std::string& a, const std::string& b)
{
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

} // namespace

void RunConfig::validate_paths(bool need_lab, bool need_field) const
{
    if (need_lab && (lab_path.empty() || !std::filesystem::exists(lab_path)))
        throw ConfigError("lab calibration file not found: '" + lab_path.string() + "'");
    if (need_field && (field_path.empty() || !std::filesystem::exists(field_path)))
        throw ConfigError("field validation file not found: '" + field_path.string() + "'");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& k : keys())
            out.push_back(k.name);
        return out;
    }();
    return names;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value)
{
    for (const auto& k : keys()) {
        if (k.name == key) {
            k.set(cfg, key, value);
            return;
        }
    }
    const auto& all = keys();
    const auto nearest = std::min_element(all.begin(), all.end(), [&](const Key& a, const Key& b) {
        return edit_distance(key, a.name) < edit_distance(key, b.name);
    });
    throw ConfigError("unknown config key '" + key + "' (did you mean '" + nearest->name + "'?)");
}

RunConfig parse_config(const std::optional<std::filesystem::path>& file,
                       const std::vector<std::pair<std::string, std::string>>& overrides)
{
    RunConfig cfg;
    if (file) {
        std::ifstream in(*file);
        if (!in)
            throw ConfigError("cannot open config file '" + file->string() + "'");
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            if (trim(line).empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(file->string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
            try {
                set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
            } catch (const ConfigError& e) {
                throw ConfigError(file->string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }
    }
    for (const auto& [k, v] : overrides)
        set_config_value(cfg, k, v);
    return cfg;
}

std::string effective_config(const RunConfig& cfg)
{
    std::string out;
    for (const auto& k : keys())
        out += k.name + " = " + k.get(cfg) + "\n";
    return out;
}

} // namespace spikecal
