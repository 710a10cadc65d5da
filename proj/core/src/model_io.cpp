#include "levydiv/model_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "levydiv/errors.hpp"
#include "levydiv/format.hpp"

namespace levydiv {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ModelError(std::string("unknown key '") + it.key() + "' in " + where);
}

double number(const json& j, const char* key) {
    if (!j.contains(key)) throw ModelError(std::string("missing key '") + key + "'");
    if (!j.at(key).is_number()) throw ModelError(std::string("key '") + key + "' must be a number");
    return j.at(key).get<double>();
}

Side parse_side(const std::string& s) {
    if (s == "spectrally-negative" || s == "sn") return Side::spectrally_negative;
    if (s == "spectrally-positive" || s == "sp") return Side::spectrally_positive;
    throw ModelError("side must be spectrally-negative or spectrally-positive, got '" + s + "'");
}

}  // namespace

std::string side_name(Side s) {
    return s == Side::spectrally_negative ? "spectrally-negative" : "spectrally-positive";
}

ModelSpec parse_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError(std::string("model file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ModelError("model must be a JSON object");
    reject_unknown(j, {"side", "drift", "sigma", "delta", "q", "jumps"}, "model");

    ModelSpec m;
    if (j.contains("side")) {
        if (!j["side"].is_string()) throw ModelError("side must be a string");
        m.side = parse_side(j["side"].get<std::string>());
    }
    m.drift = number(j, "drift");
    m.sigma = j.contains("sigma") ? number(j, "sigma") : 0.0;
    m.delta = number(j, "delta");
    m.q = j.contains("q") ? number(j, "q") : 0.05;
    if (j.contains("jumps")) {
        const json& jj = j["jumps"];
        if (!jj.is_object()) throw ModelError("jumps must be an object");
        reject_unknown(jj, {"kappa", "terms"}, "jumps");
        m.jumps.kappa = number(jj, "kappa");
        if (jj.contains("terms")) {
            if (!jj["terms"].is_array()) throw ModelError("jumps.terms must be an array");
            for (const json& t : jj["terms"]) {
                if (!t.is_object()) throw ModelError("jump term must be an object");
                reject_unknown(t, {"p", "rho", "k"}, "jump term");
                JumpTerm term;
                term.p = number(t, "p");
                term.rho = number(t, "rho");
                if (t.contains("k")) {
                    if (!t["k"].is_number_integer()) throw ModelError("k must be an integer");
                    term.k = t["k"].get<int>();
                }
                m.jumps.terms.push_back(term);
            }
        }
    }
    m.validate();
    return m;
}

ModelSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

std::string print_model(const ModelSpec& m) {
    std::ostringstream o;
    o << "{\n"
      << "  \"side\": \"" << side_name(m.side) << "\",\n"
      << "  \"drift\": " << fmt17(m.drift) << ",\n"
      << "  \"sigma\": " << fmt17(m.sigma) << ",\n"
      << "  \"delta\": " << fmt17(m.delta) << ",\n"
      << "  \"q\": " << fmt17(m.q) << ",\n"
      << "  \"jumps\": {\n"
      << "    \"kappa\": " << fmt17(m.jumps.kappa) << ",\n"
      << "    \"terms\": [";
    for (std::size_t i = 0; i < m.jumps.terms.size(); ++i) {
        const auto& t = m.jumps.terms[i];
        o << (i ? ",\n" : "\n") << "      {\"p\": " << fmt17(t.p) << ", \"rho\": " << fmt17(t.rho)
          << ", \"k\": " << t.k << "}";
    }
    o << (m.jumps.terms.empty() ? "]\n" : "\n    ]\n") << "  }\n}\n";
    return o.str();
}

}  // namespace levydiv
