#include "tceq/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace tceq {

std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

double get_num(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw std::invalid_argument(std::string("config is missing field '") + key + "'");
    }
    if (!it->is_number()) {
        throw std::invalid_argument(std::string("config field '") + key + "' must be a number");
    }
    return it->get<double>();
}

}  // namespace

ModelParams params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("params config must be a JSON object");
    static const std::set<std::string> known = {"gamma1", "gamma2", "lambda_cost", "a", "b",
                                                "beta",   "supply", "x1",          "horizon"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) {
            throw std::invalid_argument("unknown config key '" + it.key() + "'");
        }
    }
    ModelParams p;
    p.gamma1 = get_num(j, "gamma1");
    p.gamma2 = get_num(j, "gamma2");
    p.lambda_cost = get_num(j, "lambda_cost");
    p.a = get_num(j, "a");
    p.b = get_num(j, "b");
    p.beta = get_num(j, "beta");
    p.supply = get_num(j, "supply");
    p.x1 = get_num(j, "x1");
    p.horizon = get_num(j, "horizon");
    p.validate();
    return p;
}

nlohmann::json params_to_json(const ModelParams& p) {
    return nlohmann::json{{"gamma1", p.gamma1},   {"gamma2", p.gamma2},
                          {"lambda_cost", p.lambda_cost},
                          {"a", p.a},             {"b", p.b},
                          {"beta", p.beta},       {"supply", p.supply},
                          {"x1", p.x1},           {"horizon", p.horizon}};
}

ModelParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config parse error in '" + path + "': " + e.what());
    }
    if (j.is_object() && j.contains("params")) {
        if (j.size() != 1) {
            throw std::invalid_argument("config with a 'params' key may not hold other keys");
        }
        return params_from_json(j["params"]);
    }
    return params_from_json(j);
}

nlohmann::json existence_to_json(const ExistenceReport& rep) {
    return nlohmann::json{{"bound1", rep.bound1},
                          {"bound2", rep.bound2},
                          {"eps_abs", rep.eps_abs},
                          {"satisfied", rep.satisfied},
                          {"margin", rep.margin}};
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file '" + path + "'");
    out << contents;
    out.flush();
    if (!out) throw IoError("failed writing output file '" + path + "'");
}

}  // namespace tceq
