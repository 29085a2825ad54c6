#include "genrisk/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace genrisk {

const std::vector<ModelInfo>& model_registry() {
    static const std::vector<ModelInfo> registry = {
        {ModelId::PHS, "PHS", "HS"},
        {ModelId::FHS, "FHS", "HS"},
        {ModelId::AR, "AR", "PM"},
        {ModelId::AR_RET, "AR-RET", "PM"},
        {ModelId::GARCH, "GARCH", "PM"},
        {ModelId::GARCH_RET, "GARCH-RET", "PM"},
        {ModelId::GARCHt_RET, "GARCHt-RET", "PM"},
        {ModelId::NS_VS, "NS-VS", "PM"},
        {ModelId::CGAN_FC, "CGAN-FC", "NN"},
        {ModelId::CGAN_LSTM, "CGAN-LSTM", "NN"},
        {ModelId::CWGAN, "CWGAN", "NN"},
        {ModelId::CVAE, "CVAE", "NN"},
    };
    return registry;
}

const ModelInfo& model_info(ModelId id) {
    for (const auto& m : model_registry())
        if (m.id == id) return m;
    throw Error("model_info: bad id");
}

namespace {

std::string canonical(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '-' || c == '_') {
            out += '_';
        } else {
            out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
    }
    return out;
}

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::vector<int>> dp(a.size() + 1, std::vector<int>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) dp[i][0] = static_cast<int>(i);
    for (std::size_t j = 0; j <= b.size(); ++j) dp[0][j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            dp[i][j] = std::min({dp[i - 1][j] + 1, dp[i][j - 1] + 1,
                                 dp[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    return dp[a.size()][b.size()];
}

}  // namespace

ModelId model_from_name(const std::string& name) {
    const std::string c = canonical(name);
    for (const auto& m : model_registry())
        if (canonical(m.name) == c) return m.id;
    throw UnknownKey("unknown model '" + name + "'");
}

ReturnMode RunConfig::return_mode() const {
    if (return_type == "absolute") return ReturnMode::absolute;
    if (return_type == "log") return ReturnMode::log;
    throw Error("return_type must be 'absolute' or 'log'");
}

ScalerKind RunConfig::scaler_kind() const {
    if (scaler_type == "standard") return ScalerKind::standard;
    if (scaler_type == "minmax") return ScalerKind::minmax;
    throw Error("scaler_type must be 'standard' or 'minmax'");
}

void RunConfig::validate() const {
    if (dataset.empty()) throw MissingRequired("config: 'dataset' is required");
    if (!(split_fraction > 0.0 && split_fraction < 1.0))
        throw Error("config: split_fraction must be in (0,1)");
    if (condition_length < 1 || sequence_length < 1)
        throw Error("config: condition/sequence lengths must be >= 1");
    if (n_synthetic < 1) throw Error("config: n_synthetic must be >= 1");
    if (sim_paths < 1) throw Error("config: paths must be >= 1");
    if (jobs < 1) throw Error("config: jobs must be >= 1");
    (void)return_mode();
    (void)scaler_kind();
}

const std::vector<std::string>& documented_config_keys() {
    static const std::vector<std::string> keys = {
        "dataset",        "paths",           "years",          "return_type",
        "split_fraction", "data_split_seed", "condition_length",
        "sequence_length", "scaler_type",    "batch_size",     "epochs",
        "learning_rate",  "noise_dim",       "lstm_noise_dim", "clip_value",
        "critic_steps",   "hidden_dim",      "layers",         "n_synthetic",
        "long_path_steps", "seed",           "generator_seed", "models",
        "out",            "jobs",
    };
    return keys;
}

namespace {

void assign_key(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
    auto to_int = [&](const std::string& v) {
        try {
            return std::stoi(v);
        } catch (const std::exception&) {
            throw ParseError("config line " + std::to_string(line) + ": bad integer '" + v +
                             "' for " + key);
        }
    };
    auto to_u64 = [&](const std::string& v) -> std::uint64_t {
        try {
            return std::stoull(v);
        } catch (const std::exception&) {
            throw ParseError("config line " + std::to_string(line) + ": bad integer '" + v +
                             "' for " + key);
        }
    };
    auto to_double = [&](const std::string& v) {
        try {
            return std::stod(v);
        } catch (const std::exception&) {
            throw ParseError("config line " + std::to_string(line) + ": bad number '" + v +
                             "' for " + key);
        }
    };

    if (key == "dataset") cfg.dataset = value;
    else if (key == "paths") cfg.sim_paths = to_int(value);
    else if (key == "years") cfg.sim_years = to_int(value);
    else if (key == "return_type") cfg.return_type = value;
    else if (key == "split_fraction") cfg.split_fraction = to_double(value);
    else if (key == "data_split_seed") cfg.data_split_seed = to_u64(value);
    else if (key == "condition_length") cfg.condition_length = to_int(value);
    else if (key == "sequence_length") cfg.sequence_length = to_int(value);
    else if (key == "scaler_type") cfg.scaler_type = value;
    else if (key == "batch_size") cfg.batch_size = to_int(value);
    else if (key == "epochs") cfg.epochs = to_int(value);
    else if (key == "learning_rate") cfg.learning_rate = to_double(value);
    else if (key == "noise_dim") cfg.noise_dim = to_int(value);
    else if (key == "lstm_noise_dim") cfg.lstm_noise_dim = to_int(value);
    else if (key == "clip_value") cfg.clip_value = to_double(value);
    else if (key == "critic_steps") cfg.critic_steps = to_int(value);
    else if (key == "hidden_dim") cfg.hidden_dim = to_int(value);
    else if (key == "layers") cfg.layers = to_int(value);
    else if (key == "n_synthetic") cfg.n_synthetic = to_int(value);
    else if (key == "long_path_steps") cfg.long_path_steps = to_int(value);
    else if (key == "seed") cfg.seed = to_u64(value);
    else if (key == "generator_seed") cfg.generator_seed = to_u64(value);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "jobs") cfg.jobs = to_int(value);
    else if (key == "models") {
        cfg.models.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            const auto e = item.find_last_not_of(" \t");
            if (b == std::string::npos) continue;
            cfg.models.push_back(model_from_name(item.substr(b, e - b + 1)));
        }
    } else {
        // Unknown key: name the nearest documented one.
        std::string best;
        int best_d = 1 << 20;
        for (const auto& k : documented_config_keys()) {
            const int d = edit_distance(key, k);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        throw UnknownKey("config line " + std::to_string(line) + ": unknown key '" + key +
                         "' (nearest match: '" + best + "')");
    }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(lineno) + ", column " +
                             std::to_string(line.size()) + ": expected 'key = value'");
        auto trim = [](std::string s) {
            const auto x = s.find_first_not_of(" \t\r");
            if (x == std::string::npos) return std::string();
            const auto y = s.find_last_not_of(" \t\r");
            return s.substr(x, y - x + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("config line " + std::to_string(lineno) + ", column 1: empty key");
        assign_key(cfg, key, value, lineno);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    RunConfig cfg = parse_config(ss.str());
    apply_env_overrides(cfg);
    return cfg;
}

void apply_env_overrides(RunConfig& cfg) {
    for (const auto& key : documented_config_keys()) {
        std::string env = "GENRISK_";
        for (char c : key) env += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (const char* v = std::getenv(env.c_str())) assign_key(cfg, key, v, 0);
    }
}

}  // namespace genrisk
