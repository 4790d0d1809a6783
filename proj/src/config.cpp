#include "asc/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace asc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

Dims parse_dims(const std::string& v) {
    Dims d;
    std::string cleaned = v;
    for (char& c : cleaned)
        if (c == 'x' || c == 'X') c = ',';
    std::stringstream ss(cleaned);
    std::string tok;
    std::vector<int> parts;
    while (std::getline(ss, tok, ',')) parts.push_back(std::stoi(trim(tok)));
    if (parts.size() == 1) return {parts[0], parts[0], parts[0]};
    if (parts.size() == 3) return {parts[0], parts[1], parts[2]};
    throw std::invalid_argument("config: dims must be one or three integers");
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: bad boolean value '" + v + "'");
}

}  // namespace

Config parse_config_text(const std::string& text) {
    Config cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));

        if (key == "dims") cfg.dims = parse_dims(val);
        else if (key == "classes") cfg.classes = std::stoi(val);
        else if (key == "beta") cfg.beta = std::stod(val);
        else if (key == "alpha") cfg.alpha = std::stod(val);
        else if (key == "gamma") cfg.gamma = std::stod(val);
        else if (key == "lr") cfg.lr = std::stod(val);
        else if (key == "epochs") cfg.epochs = std::stoi(val);
        else if (key == "batch") cfg.batch = std::stoi(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "ablation") cfg.ablation = val;
        else if (key == "deterministic") cfg.deterministic = parse_bool(val);
        else if (key == "ckpt_every") cfg.ckpt_every = std::stoi(val);
        else if (key == "data_dir") cfg.data_dir = val;
        else if (key == "out_dir") cfg.out_dir = val;
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
    return cfg;
}

Config parse_config_file(const std::string& path) {
    return parse_config_text(read_text_file(path));
}

std::string config_json(const Config& cfg) {
    nlohmann::json j;
    j["dims"] = {cfg.dims[0], cfg.dims[1], cfg.dims[2]};
    j["classes"] = cfg.classes;
    j["beta"] = cfg.beta;
    j["alpha"] = cfg.alpha;
    j["gamma"] = cfg.gamma;
    j["lr"] = cfg.lr;
    j["epochs"] = cfg.epochs;
    j["batch"] = cfg.batch;
    j["seed"] = cfg.seed;
    j["ablation"] = cfg.ablation;
    j["deterministic"] = cfg.deterministic;
    j["ckpt_every"] = cfg.ckpt_every;
    j["data_dir"] = cfg.data_dir;
    j["out_dir"] = cfg.out_dir;
    return j.dump(2) + "\n";
}

std::vector<ManifestRow> read_manifest(const std::string& path) {
    std::stringstream ss(read_text_file(path));
    std::string line;
    if (!std::getline(ss, line) || trim(line) != "path,role,subset")
        throw ParseError("manifest: bad header in " + path);
    std::vector<ManifestRow> rows;
    while (std::getline(ss, line)) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto c1 = t.find(',');
        const auto c2 = t.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ParseError("manifest: malformed row '" + t + "' in " + path);
        rows.push_back({t.substr(0, c1), t.substr(c1 + 1, c2 - c1 - 1), t.substr(c2 + 1)});
    }
    return rows;
}

void write_manifest(const std::string& path, const std::vector<ManifestRow>& rows) {
    std::string out = "path,role,subset\n";
    for (const auto& r : rows) out += r.path + "," + r.role + "," + r.subset + "\n";
    write_text_file(path, out);
}

std::string labels_path_for(const std::string& image_path) {
    const auto dot = image_path.rfind(".rvol");
    if (dot == std::string::npos) return image_path + "_labels";
    return image_path.substr(0, dot) + "_labels.rvol";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << text;
    if (!f) throw std::runtime_error("short write: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace asc
