#include "slicevis/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "slicevis/error.hpp"

namespace slicevis {

using nlohmann::json;

namespace {

/// A JSON object being read, remembering its path for error messages and
/// rejecting keys nobody asked for.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected an object");
    }

    /// True if the key is present and not null. Marks the key as consumed.
    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    std::string child(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    double number(const std::string& key, double fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(child(key) + ": expected a number");
        return v.get<double>();
    }

    std::optional<double> optional_number(const std::string& key, std::optional<double> fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        if (j_.at(key).is_null()) return std::nullopt;
        return number(key, 0.0);
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(child(key) + ": expected an integer");
        return v.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_unsigned())
            throw ConfigError(child(key) + ": expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!seen_.count(key)) throw ConfigError(child(key) + ": unknown key");
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError((path_.empty() ? std::string("config") : path_) + ": " + what);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Interval read_pair(const json& j, const std::string& path, const char* a, const char* b) {
    Reader r(j, path);
    if (!r.has(a) || !r.has(b)) r.fail(std::string("expected keys '") + a + "' and '" + b + "'");
    Interval out{r.number(a, 0.0), r.number(b, 0.0)};
    r.finish();
    return out;
}

ProfileTable read_profiles(const json& j, const std::string& path) {
    ProfileTable table = ProfileTable::defaults();
    Reader r(j, path);
    for (auto t : kAllSlices) {
        const std::string name(slice_name(t));
        if (!r.has(name)) continue;
        Reader slice(r.raw(name), r.child(name));
        SliceProfile p = table.at(t);
        for (std::size_t k = 0; k < kNumKpis; ++k) {
            const std::string kpi(kpi_name(static_cast<Kpi>(k)));
            if (!slice.has(kpi)) continue;
            const auto pair = read_pair(slice.raw(kpi), slice.child(kpi), "mu", "sigma");
            p.kpis[k] = {pair.lo, pair.hi};
        }
        slice.finish();
        table.set(t, p);
    }
    // An explicit null removes a profile, which surfaces later as a
    // configuration error for that slice.
    for (auto t : kAllSlices) {
        const std::string name(slice_name(t));
        if (j.contains(name) && j.at(name).is_null()) table.slices[index_of(t)].reset();
    }
    r.finish();
    validate(table);
    return table;
}

NoiseConfig read_noise(const json& j, const std::string& path) {
    Reader r(j, path);
    NoiseConfig n;
    n.alpha = r.number("alpha", n.alpha);
    n.beta = r.number("beta", n.beta);
    n.noise_scale = r.number("noise_scale", n.noise_scale);
    n.contamination_prob = r.number("contamination_prob", n.contamination_prob);
    n.outlier_prob = r.number("outlier_prob", n.outlier_prob);
    n.weibull_shape = r.number("weibull_shape", n.weibull_shape);
    n.weibull_scale = r.number("weibull_scale", n.weibull_scale);
    r.finish();
    validate(n);
    return n;
}

Kpi read_kpi(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path + ": expected a KPI name");
    auto k = kpi_from_name(j.get<std::string>());
    if (!k) throw ConfigError(path + ": unknown KPI '" + j.get<std::string>() + "'");
    return *k;
}

CorrelationModel read_correlation(const json& j, const std::string& path) {
    Reader r(j, path);
    if (r.has("matrix") && r.has("pairs")) r.fail("give either 'matrix' or 'pairs', not both");
    if (r.has("matrix")) {
        const auto& m = r.raw("matrix");
        const auto mpath = r.child("matrix");
        if (!m.is_array() || m.size() != kNumKpis)
            throw ConfigError(mpath + ": expected a 10x10 array");
        CorrelationMatrix out;
        for (std::size_t i = 0; i < kNumKpis; ++i) {
            const auto& row = m.at(i);
            if (!row.is_array() || row.size() != kNumKpis)
                throw ConfigError(mpath + "[" + std::to_string(i) + "]: expected 10 entries");
            for (std::size_t k = 0; k < kNumKpis; ++k) {
                if (!row.at(k).is_number())
                    throw ConfigError(mpath + "[" + std::to_string(i) + "][" + std::to_string(k) +
                                      "]: expected a number");
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                    row.at(k).get<double>();
            }
        }
        r.finish();
        return CorrelationModel(out);
    }
    std::vector<std::tuple<Kpi, Kpi, double>> pairs;
    if (r.has("pairs")) {
        const auto& arr = r.raw("pairs");
        const auto ppath = r.child("pairs");
        if (!arr.is_array()) throw ConfigError(ppath + ": expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto epath = ppath + "[" + std::to_string(i) + "]";
            Reader e(arr.at(i), epath);
            const Kpi a = read_kpi(e.raw("a"), e.child("a"));
            const Kpi b = read_kpi(e.raw("b"), e.child("b"));
            if (!e.has("rho")) e.fail("missing 'rho'");
            const double rho = e.number("rho", 0.0);
            e.finish();
            pairs.emplace_back(a, b, rho);
        }
    }
    r.finish();
    return CorrelationModel::from_pairs(pairs);
}

NormalizationBounds read_bounds(const json& j, const std::string& path,
                                const NormalizationBounds& fallback) {
    Reader r(j, path);
    auto b = fallback.all();
    for (std::size_t k = 0; k < kNumKpis; ++k) {
        const std::string kpi(kpi_name(static_cast<Kpi>(k)));
        if (r.has(kpi)) b[k] = read_pair(r.raw(kpi), r.child(kpi), "lo", "hi");
    }
    r.finish();
    return NormalizationBounds(b);
}

template <std::size_t N>
std::array<double, N> read_array(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != N)
        throw ConfigError(path + ": expected " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!j.at(i).is_number()) throw ConfigError(path + ": expected numbers");
        out[i] = j.at(i).get<double>();
    }
    return out;
}

void read_encoders(const json& j, const std::string& path, Config& c) {
    Reader r(j, path);
    if (r.has("physical")) {
        Reader p(r.raw("physical"), r.child("physical"));
        auto& ph = c.encoders.physical;
        ph.sigma_delta_gain = p.optional_number("sigma_delta_gain", ph.sigma_delta_gain);
        ph.f_j_gain = p.number("f_j_gain", ph.f_j_gain);
        ph.gamma = p.number("gamma", ph.gamma);
        ph.stripe_gain = p.number("stripe_gain", ph.stripe_gain);
        ph.shift_gain = p.optional_number("shift_gain", ph.shift_gain);
        if (p.has("smooth_sigma")) {
            Reader s(p.raw("smooth_sigma"), p.child("smooth_sigma"));
            for (auto t : kAllSlices)
                ph.smooth_sigma[index_of(t)] =
                    s.number(std::string(slice_name(t)), ph.smooth_sigma[index_of(t)]);
            s.finish();
        }
        p.finish();
    }
    if (r.has("perlin")) {
        Reader p(r.raw("perlin"), r.child("perlin"));
        auto& pe = c.encoders.perlin;
        if (p.has("base_frequency"))
            pe.base_frequency = read_array<3>(p.raw("base_frequency"), p.child("base_frequency"));
        pe.octave_base = static_cast<int>(p.integer("octave_base", pe.octave_base));
        pe.octave_gain = static_cast<int>(p.integer("octave_gain", pe.octave_gain));
        pe.persistence_base = p.number("persistence_base", pe.persistence_base);
        if (p.has("permutation_seed"))
            c.permutation_seed = p.unsigned_integer("permutation_seed", 0);
        p.finish();
    }
    if (r.has("wallpaper")) {
        Reader p(r.raw("wallpaper"), r.child("wallpaper"));
        auto& w = c.encoders.wallpaper;
        if (p.has("weights")) {
            const auto& arr = p.raw("weights");
            const auto wpath = p.child("weights");
            if (!arr.is_array() || arr.size() != 3)
                throw ConfigError(wpath + ": expected three rows (r, g, b)");
            for (std::size_t ch = 0; ch < 3; ++ch)
                w.weights[ch] = read_array<3>(arr.at(ch), wpath + "[" + std::to_string(ch) + "]");
        }
        w.period_1y = p.number("period_1y", w.period_1y);
        w.period_2x = p.number("period_2x", w.period_2x);
        w.period_3 = p.optional_number("period_3", w.period_3);
        w.resource_gain = p.number("resource_gain", w.resource_gain);
        p.finish();
    }
    if (r.has("fractal")) {
        Reader p(r.raw("fractal"), r.child("fractal"));
        auto& f = c.encoders.fractal;
        f.initial_length = p.optional_number("initial_length", f.initial_length);
        f.shrink_base = p.number("shrink_base", f.shrink_base);
        f.delay_gain = p.number("delay_gain", f.delay_gain);
        f.base_angle = p.number("base_angle", f.base_angle);
        f.precise_jitter_threshold =
            p.number("precise_jitter_threshold", f.precise_jitter_threshold);
        f.green_depth = static_cast<int>(p.integer("green_depth", f.green_depth));
        p.finish();
    }
    r.finish();
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

Config Config::defaults() {
    Config c;
    c.set_seed(c.master_seed);
    return c;
}

void Config::set_seed(std::uint64_t seed) {
    master_seed = seed;
    encoders.perlin.permutation = Permutation(permutation_seed.value_or(master_seed));
}

bool Config::enabled(Method m) const noexcept {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

std::vector<Method> parse_methods(const std::string& csv) {
    std::vector<Method> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        item = item.substr(first, item.find_last_not_of(" \t") - first + 1);
        auto m = method_from_name(item);
        if (!m)
            throw UsageError("unknown method '" + item +
                             "' (valid: physical, perlin, wallpaper, fractal)");
        if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
    }
    if (out.empty()) throw UsageError("no methods selected (valid: physical, perlin, wallpaper, fractal)");
    return out;
}

Config config_from_json(const json& j) {
    Config c;
    Reader r(j, "");
    c.master_seed = r.unsigned_integer("master_seed", c.master_seed);

    if (r.has("class_mix")) {
        Reader m(r.raw("class_mix"), "class_mix");
        for (auto t : kAllSlices)
            c.class_mix.p[index_of(t)] =
                m.number(std::string(slice_name(t)), c.class_mix.p[index_of(t)]);
        m.finish();
    }
    validate(c.class_mix);

    const auto side = r.integer("image_side", static_cast<std::int64_t>(c.encoders.side));
    if (side < 4 || side > 4096) throw ConfigError("image_side: must lie in [4, 4096]");
    c.encoders.side = static_cast<std::size_t>(side);

    if (r.has("methods")) {
        const auto& arr = r.raw("methods");
        if (!arr.is_array()) throw ConfigError("methods: expected an array of names");
        c.methods.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto path = "methods[" + std::to_string(i) + "]";
            if (!arr.at(i).is_string()) throw ConfigError(path + ": expected a method name");
            auto m = method_from_name(arr.at(i).get<std::string>());
            if (!m) throw ConfigError(path + ": unknown method '" + arr.at(i).get<std::string>() + "'");
            if (!c.enabled(*m)) c.methods.push_back(*m);
        }
        if (c.methods.empty()) throw ConfigError("methods: at least one method is required");
    }

    if (r.has("profiles")) c.profiles = read_profiles(r.raw("profiles"), "profiles");
    if (r.has("noise")) c.noise = read_noise(r.raw("noise"), "noise");
    if (r.has("correlation")) c.correlation = read_correlation(r.raw("correlation"), "correlation");

    bool complete = true;
    for (const auto& s : c.profiles.slices) complete = complete && s.has_value();
    const auto fallback = complete ? default_bounds(c.profiles) : c.bounds;
    c.bounds = r.has("normalization")
                   ? read_bounds(r.raw("normalization"), "normalization", fallback)
                   : fallback;

    if (r.has("encoders")) read_encoders(r.raw("encoders"), "encoders", c);
    r.finish();

    c.set_seed(c.master_seed);
    validate(c);
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

void validate(const Config& c) {
    validate(c.class_mix);
    validate(c.noise);
    validate(c.profiles);
    for (auto t : kAllSlices) c.profiles.at(t);
    validate(c.encoders);
    if (c.methods.empty()) throw ConfigError("methods: at least one method is required");
}

json config_to_json(const Config& c) {
    json j;
    j["master_seed"] = c.master_seed;
    j["class_mix"] = json::object();
    for (auto t : kAllSlices) j["class_mix"][std::string(slice_name(t))] = c.class_mix.p[index_of(t)];
    j["image_side"] = c.encoders.side;
    j["methods"] = json::array();
    for (auto m : c.methods) j["methods"].push_back(std::string(method_name(m)));

    j["profiles"] = json::object();
    for (auto t : kAllSlices) {
        if (!c.profiles.slices[index_of(t)]) {
            j["profiles"][std::string(slice_name(t))] = nullptr;
            continue;
        }
        json slice = json::object();
        for (std::size_t k = 0; k < kNumKpis; ++k) {
            const auto& m = c.profiles.at(t).kpis[k];
            slice[std::string(kpi_name(static_cast<Kpi>(k)))] = {{"mu", m.mu}, {"sigma", m.sigma}};
        }
        j["profiles"][std::string(slice_name(t))] = slice;
    }

    const auto& n = c.noise;
    j["noise"] = {{"alpha", n.alpha},
                  {"beta", n.beta},
                  {"noise_scale", n.noise_scale},
                  {"contamination_prob", n.contamination_prob},
                  {"outlier_prob", n.outlier_prob},
                  {"weibull_shape", n.weibull_shape},
                  {"weibull_scale", n.weibull_scale}};

    json pairs = json::array();
    const auto& in = c.correlation.input();
    for (std::size_t a = 0; a < kNumKpis; ++a)
        for (std::size_t b = a + 1; b < kNumKpis; ++b) {
            const double rho = in(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            if (rho == 0.0) continue;
            pairs.push_back({{"a", std::string(kpi_name(static_cast<Kpi>(a)))},
                             {"b", std::string(kpi_name(static_cast<Kpi>(b)))},
                             {"rho", rho}});
        }
    j["correlation"] = {{"pairs", pairs}};

    j["normalization"] = json::object();
    for (std::size_t k = 0; k < kNumKpis; ++k) {
        const auto& b = c.bounds.all()[k];
        j["normalization"][std::string(kpi_name(static_cast<Kpi>(k)))] = {{"lo", b.lo},
                                                                          {"hi", b.hi}};
    }

    const auto& e = c.encoders;
    j["encoders"]["physical"] = {
        {"sigma_delta_gain", optional_json(e.physical.sigma_delta_gain)},
        {"f_j_gain", e.physical.f_j_gain},
        {"gamma", e.physical.gamma},
        {"stripe_gain", e.physical.stripe_gain},
        {"shift_gain", optional_json(e.physical.shift_gain)},
        {"smooth_sigma",
         {{"eMBB", e.physical.smooth_sigma[0]},
          {"URLLC", e.physical.smooth_sigma[1]},
          {"mIoT", e.physical.smooth_sigma[2]}}},
    };
    j["encoders"]["perlin"] = {
        {"base_frequency", e.perlin.base_frequency},
        {"octave_base", e.perlin.octave_base},
        {"octave_gain", e.perlin.octave_gain},
        {"persistence_base", e.perlin.persistence_base},
        {"permutation_seed", c.permutation_seed ? json(*c.permutation_seed) : json(nullptr)},
    };
    j["encoders"]["wallpaper"] = {
        {"weights", e.wallpaper.weights},
        {"period_1y", e.wallpaper.period_1y},
        {"period_2x", e.wallpaper.period_2x},
        {"period_3", optional_json(e.wallpaper.period_3)},
        {"resource_gain", e.wallpaper.resource_gain},
    };
    j["encoders"]["fractal"] = {
        {"initial_length", optional_json(e.fractal.initial_length)},
        {"shrink_base", e.fractal.shrink_base},
        {"delay_gain", e.fractal.delay_gain},
        {"base_angle", e.fractal.base_angle},
        {"precise_jitter_threshold", e.fractal.precise_jitter_threshold},
        {"green_depth", e.fractal.green_depth},
    };
    return j;
}

std::string config_text(const Config& c) { return config_to_json(c).dump(2) + "\n"; }

}  // namespace slicevis
