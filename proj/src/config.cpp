#include "fskmc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "fskmc/errors.hpp"
#include "fskmc/rng.hpp"

namespace fskmc {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    // "1/8" is accepted so time steps can be written exactly
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        double num = 0.0;
        double den = 0.0;
        if (!parse_double(s.substr(0, slash), num) || !parse_double(s.substr(slash + 1), den) || den == 0.0) {
            return false;
        }
        out = num / den;
        return std::isfinite(out);
    }
    if (s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size() && std::isfinite(out);
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    // allow 1e5-style replica counts as long as they are integral
    if (s.find_first_of(".eE") != std::string_view::npos) {
        double d = 0.0;
        if (!parse_double(s, d) || d != std::floor(d) || std::fabs(d) > 9.0e15) return false;
        if (d < 0 && !std::is_signed_v<Int>) return false;
        out = static_cast<Int>(d);
        return true;
    }
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

std::string strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
    }
    return std::string(line);
}

std::string unquote(std::string_view v) {
    v = trim(v);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return std::string(v.substr(1, v.size() - 2));
    // arrays written TOML-style: [1, 0.5, 0.25] or ["coverage", "variance"]
    if (v.size() >= 2 && v.front() == '[' && v.back() == ']') {
        std::string items(v.substr(1, v.size() - 2));
        std::erase(items, '"');
        return items;
    }
    return std::string(v);
}

using Setter = std::function<bool(RunConfig&, std::string_view)>;

Setter real(double RunConfig::*field) {
    return [field](RunConfig& c, std::string_view v) { return parse_double(v, c.*field); };
}
Setter model_real(double ModelConfig::*field) {
    return [field](RunConfig& c, std::string_view v) { return parse_double(v, c.model.*field); };
}
template <class Int>
Setter integer(Int RunConfig::*field) {
    return [field](RunConfig& c, std::string_view v) { return parse_int(v, c.*field); };
}

bool set_lengths(RunConfig& c, std::string_view v) {
    std::vector<int> lengths;
    for (auto part : split(v, ',')) {
        int n = 0;
        if (!parse_int(part, n)) return false;
        lengths.push_back(n);
    }
    c.lengths = std::move(lengths);
    return true;
}

bool set_scheme(RunConfig& c, std::string_view v) {
    try {
        apply_scheme_override(c, v);
        return true;
    } catch (const ConfigError&) {
        return false;
    }
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table{
        {"model.type",
         [](RunConfig& c, std::string_view v) {
             if (v != "spin_flip" && v != "kawasaki") return false;
             c.model.type = std::string(v);
             return true;
         }},
        {"model.beta", model_real(&ModelConfig::beta)},
        {"model.J", model_real(&ModelConfig::coupling)},
        {"model.field", model_real(&ModelConfig::field)},
        {"model.c_a", model_real(&ModelConfig::c_a)},
        {"model.c_d", model_real(&ModelConfig::c_d)},
        {"model.c_h", model_real(&ModelConfig::c_h)},
        {"lattice.dim", integer(&RunConfig::dimension)},
        {"lattice.length", set_lengths},
        {"lattice.lengths", set_lengths},
        {"decomposition.q", integer(&RunConfig::q)},
        {"scheme.kind", set_scheme},
        {"scheme.dt", [](RunConfig& c, std::string_view v) { return parse_double(v, c.schedule.dt); }},
        {"scheme.p", [](RunConfig& c, std::string_view v) { return parse_double(v, c.schedule.p); }},
        {"scheme.mode",
         [](RunConfig& c, std::string_view v) {
             if (v == "raw") c.schedule.mode = RandomMode::raw;
             else if (v == "rescaled") c.schedule.mode = RandomMode::rescaled;
             else return false;
             return true;
         }},
        {"run.T", real(&RunConfig::horizon)},
        {"run.grid", integer(&RunConfig::grid)},
        {"run.samples", integer(&RunConfig::samples)},
        {"run.reference_samples", integer(&RunConfig::reference_samples)},
        {"run.seed", integer(&RunConfig::seed)},
        {"run.workers", integer(&RunConfig::workers)},
        {"run.initial",
         [](RunConfig& c, std::string_view v) {
             try {
                 c.initial = InitialCondition::parse(v);
                 return true;
             } catch (const ConfigError&) {
                 return false;
             }
         }},
        {"observables",
         [](RunConfig& c, std::string_view v) {
             try {
                 c.observables = Observable::parse_list(v);
                 return true;
             } catch (const ConfigError&) {
                 return false;
             }
         }},
        {"sweep.dt",
         [](RunConfig& c, std::string_view v) {
             std::vector<double> xs;
             for (auto part : split(v, ',')) {
                 double x = 0.0;
                 if (!parse_double(part, x)) return false;
                 xs.push_back(x);
             }
             c.sweep_dt = std::move(xs);
             return true;
         }},
        {"sweep.q",
         [](RunConfig& c, std::string_view v) {
             std::vector<int> xs;
             for (auto part : split(v, ',')) {
                 int x = 0;
                 if (!parse_int(part, x)) return false;
                 xs.push_back(x);
             }
             c.sweep_q = std::move(xs);
             return true;
         }},
    };
    return table;
}

}  // namespace

InitialCondition InitialCondition::parse(std::string_view text) {
    text = trim(text);
    InitialCondition ic;
    if (text == "empty") ic.kind = Kind::empty;
    else if (text == "full") ic.kind = Kind::full;
    else if (text == "group1") ic.kind = Kind::group1;
    else if (text == "group2") ic.kind = Kind::group2;
    else if (text == "random" || text.starts_with("random:")) {
        ic.kind = Kind::random;
        if (text.size() > 7 && (!parse_double(text.substr(7), ic.density) || ic.density < 0.0 || ic.density > 1.0)) {
            throw ConfigError("run.initial: density must lie in [0, 1]");
        }
    } else {
        throw ConfigError("run.initial: unknown initial condition '" + std::string(text) + "'");
    }
    return ic;
}

std::string InitialCondition::name() const {
    switch (kind) {
        case Kind::empty: return "empty";
        case Kind::full: return "full";
        case Kind::group1: return "group1";
        case Kind::group2: return "group2";
        case Kind::random: {
            std::ostringstream os;
            os << "random:" << density;
            return os.str();
        }
    }
    return "empty";
}

void apply_scheme_override(RunConfig& cfg, std::string_view scheme) {
    if (scheme == "ssa") {
        cfg.engine = Engine::ssa;
        return;
    }
    if (scheme == "lie") cfg.schedule.kind = SchemeKind::lie;
    else if (scheme == "strang") cfg.schedule.kind = SchemeKind::strang;
    else if (scheme == "random") {
        cfg.schedule.kind = SchemeKind::random;
        cfg.schedule.mode = RandomMode::rescaled;
    } else if (scheme == "random-raw") {
        cfg.schedule.kind = SchemeKind::random;
        cfg.schedule.mode = RandomMode::raw;
    } else {
        throw ConfigError("scheme: expected lie, strang, random, random-raw or ssa, got '" + std::string(scheme) + "'");
    }
    cfg.engine = Engine::fs_kmc;
}

std::string RunConfig::scheme_label() const {
    return engine == Engine::ssa ? "ssa" : scheme_name(schedule.kind, schedule.mode);
}

void RunConfig::validate() const {
    std::vector<std::string> issues;
    const auto need = [&](bool ok, const char* msg) {
        if (!ok) issues.emplace_back(msg);
    };
    const auto finite = [](double x) { return std::isfinite(x); };
    need(finite(model.beta) && model.beta >= 0.0, "model.beta: must be finite and nonnegative");
    need(finite(model.coupling), "model.J: must be finite");
    need(finite(model.field), "model.field: must be finite");
    need(finite(model.c_a) && model.c_a >= 0.0, "model.c_a: must be finite and nonnegative");
    need(finite(model.c_d) && model.c_d >= 0.0, "model.c_d: must be finite and nonnegative");
    need(finite(model.c_h) && model.c_h >= 0.0, "model.c_h: must be finite and nonnegative");
    need(dimension == 1 || dimension == 2, "lattice.dim: must be 1 or 2");
    need(static_cast<int>(lengths.size()) == dimension, "lattice.length: one length per dimension required");
    for (int n : lengths) need(n >= 1, "lattice.length: lengths must be positive");
    need(q >= 1, "decomposition.q: must be positive");
    need(finite(horizon) && horizon >= 0.0, "run.T: must be finite and nonnegative");
    need(grid >= 2, "run.grid: must be at least 2");
    need(samples >= 1, "run.samples: must be at least 1");
    need(reference_samples >= 1, "run.reference_samples: must be at least 1");
    need(workers >= 1, "run.workers: must be at least 1");
    need(!observables.empty(), "observables: at least one observable required");
    need(finite(schedule.dt) && schedule.dt > 0.0, "scheme.dt: must be finite and positive");
    need(finite(schedule.p) && schedule.p >= 0.0 && schedule.p <= 1.0, "scheme.p: must lie in [0, 1]");
    if (engine == Engine::fs_kmc && issues.empty()) {
        try {
            (void)window_count(horizon, schedule.dt);
        } catch (const ConfigError&) {
            issues.emplace_back("scheme.dt: T must be an integer multiple of dt");
        }
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::vector<std::string> issues;
    std::map<std::string, int, std::less<>> seen;
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string stripped = strip_comment(raw);
        const auto line = trim(stripped);
        if (line.empty()) continue;
        const auto where = "line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') {
                issues.push_back(where + "unterminated section header");
                continue;
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            issues.push_back(where + "expected key = value");
            continue;
        }
        const auto short_key = trim(line.substr(0, eq));
        const std::string key = section.empty() ? std::string(short_key) : section + "." + std::string(short_key);
        const std::string value = unquote(line.substr(eq + 1));
        if (auto [it, fresh] = seen.emplace(key, line_no); !fresh) {
            issues.push_back(key + ": duplicate key (first set on line " + std::to_string(it->second) + ")");
            continue;
        }
        const auto& table = setters();
        const auto found = table.find(key);
        if (found == table.end()) {
            issues.push_back(key + ": unknown key");
            continue;
        }
        if (!found->second(cfg, trim(value))) issues.push_back(key + ": invalid value '" + value + "'");
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

ModelPtr make_model(const ModelConfig& cfg) {
    if (cfg.type == "kawasaki") return std::make_shared<ExchangeModel>(ExchangeParams{cfg.beta, cfg.coupling, cfg.c_h});
    if (cfg.type == "spin_flip") {
        return std::make_shared<SpinFlipModel>(SpinFlipParams{cfg.beta, cfg.coupling, cfg.field, cfg.c_a, cfg.c_d});
    }
    throw ConfigError("model.type: unknown model '" + cfg.type + "'");
}

Lattice make_lattice(const RunConfig& cfg) { return build_lattice(cfg.dimension, cfg.lengths); }

Configuration make_initial(const RunConfig& cfg, const Lattice& lat, std::uint64_t replica) {
    using Kind = InitialCondition::Kind;
    Configuration sigma(lat.size());
    switch (cfg.initial.kind) {
        case Kind::empty: break;
        case Kind::full:
            for (Site x = 0; x < static_cast<Site>(lat.size()); ++x) sigma[x] = 1;
            break;
        case Kind::group1:
        case Kind::group2: {
            if (cfg.q < 1) throw ConfigError("decomposition.q: must be positive");
            const int want = cfg.initial.kind == Kind::group1 ? 0 : 1;
            for (Site x = 0; x < static_cast<Site>(lat.size()); ++x) {
                const int cell = lat.coords(x)[0] / cfg.q;
                if (cell % 2 == want) sigma[x] = 1;
            }
            break;
        }
        case Kind::random: {
            auto rng = RngStream::keyed(cfg.seed, replica, StreamRole::initial);
            for (Site x = 0; x < static_cast<Site>(lat.size()); ++x) {
                sigma[x] = rng.uniform() < cfg.initial.density ? 1 : 0;
            }
            break;
        }
    }
    return sigma;
}

}  // namespace fskmc
