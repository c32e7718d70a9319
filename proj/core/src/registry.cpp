#include "lilbound/registry.hpp"

#include <map>
#include <sstream>

#include "lilbound/errors.hpp"
#include "lilbound/io.hpp"

namespace lilbound {

namespace {

struct ParsedId {
    std::string name;
    std::map<std::string, std::string> params;
};

std::string patterns(const std::vector<RegistryEntry>& entries) {
    std::string out;
    for (const auto& e : entries) out += (out.empty() ? "" : ", ") + e.pattern;
    return out;
}

[[noreturn]] void unknown(const std::string& what, const std::string& id, const std::vector<RegistryEntry>& entries) {
    throw RegistryError("unknown " + what + " id '" + id + "' (" + what + " registry: " + patterns(entries) + ")");
}

ParsedId parse_id(const std::string& id) {
    ParsedId out;
    const auto colon = id.find(':');
    out.name = id.substr(0, colon);
    if (colon == std::string::npos) return out;
    std::stringstream rest(id.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw RegistryError("malformed parameter '" + item + "' in id '" + id + "'");
        out.params[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

double number_param(const ParsedId& parsed, const std::string& key, const std::string& id,
                    std::optional<double> fallback = std::nullopt) {
    const auto it = parsed.params.find(key);
    if (it == parsed.params.end()) {
        if (fallback) return *fallback;
        throw RegistryError("id '" + id + "' is missing parameter '" + key + "'");
    }
    try {
        return parse_double(it->second);
    } catch (const Error&) {
        throw RegistryError("parameter '" + key + "' of id '" + id + "' is not a number");
    }
}

std::string suffix_after_colon(const std::string& id) {
    const auto colon = id.find(':');
    return colon == std::string::npos ? std::string{} : id.substr(colon + 1);
}

}  // namespace

std::vector<RegistryEntry> model_registry() {
    return {
        {"chaos:d=<d>", "degree-d Rademacher chaos, sigma^2(n) = C(n, d)"},
        {"weightedA:beta=<beta>[,noise=weibull,r=<r>]", "sum_k 2^-k xi(k), sigma^2(n) = beta^2 (1 - 4^-n) / 3"},
        {"powerlaw:gamma=<gamma>[,M=log|invlog]", "sigma(n) = n^gamma M(n), bound engine only"},
    };
}

std::vector<RegistryEntry> phi_registry() {
    return {
        {"phi2", "lambda^2 / 2"},
        {"power:q=<q>", "|lambda|^q / q, q > 1"},
        {"cosh", "cosh(lambda) - 1"},
        {"subexp", "-log(1 - lambda^2), lambda0 = 1"},
        {"table:<path.csv>", "two-column (lambda, phi) table"},
    };
}

std::vector<RegistryEntry> norming_registry() {
    return {
        {"loglog:r=<r>", "[log log(n + 3)]^(1/r)"},
        {"const:c=<c>", "constant c"},
        {"table:<path.csv>", "single-column table v(1), v(2), ..."},
    };
}

ResolvedModel resolve_model(const std::string& id) {
    const ParsedId parsed = parse_id(id);
    if (parsed.name == "chaos") {
        const double d = number_param(parsed, "d", id);
        if (d != static_cast<double>(static_cast<int>(d))) throw RegistryError("chaos degree must be an integer");
        MartingaleModel model = MartingaleModel::chaos(static_cast<int>(d));
        return {id, model, model.sigma_profile(), model.first_index() - 1, model.phi()};
    }
    if (parsed.name == "weightedA") {
        const double beta = number_param(parsed, "beta", id, 1.0);
        NoiseKind noise = NoiseKind::rademacher;
        if (const auto it = parsed.params.find("noise"); it != parsed.params.end()) {
            if (it->second == "weibull") {
                noise = NoiseKind::weibull;
            } else if (it->second != "rademacher") {
                throw RegistryError("noise must be 'rademacher' or 'weibull' in id '" + id + "'");
            }
        }
        const double r = number_param(parsed, "r", id, 2.0);
        MartingaleModel model = MartingaleModel::weighted_iid(beta, noise, r);
        return {id, model, model.sigma_profile(), 0, model.phi()};
    }
    if (parsed.name == "powerlaw") {
        const double gamma = number_param(parsed, "gamma", id);
        auto factor = SigmaProfile::SlowFactor::one;
        if (const auto it = parsed.params.find("M"); it != parsed.params.end()) {
            if (it->second == "log") {
                factor = SigmaProfile::SlowFactor::log;
            } else if (it->second == "invlog") {
                factor = SigmaProfile::SlowFactor::inverse_log;
            } else if (it->second != "one" && it->second != "1") {
                throw RegistryError("M must be one of 1, log, invlog in id '" + id + "'");
            }
        }
        return {id, std::nullopt, power_law_surrogate(gamma, factor), 0, std::nullopt};
    }
    unknown("model", id, model_registry());
}

PhiFunction resolve_phi(const std::string& id) {
    if (id == "phi2") return phi2();
    if (id == "cosh") return cosh_phi();
    if (id == "subexp") return subexponential_phi();
    if (id.rfind("table:", 0) == 0) return load_table_phi(suffix_after_colon(id));
    const ParsedId parsed = parse_id(id);
    if (parsed.name == "power") return power_phi(number_param(parsed, "q", id));
    unknown("phi", id, phi_registry());
}

NormingSequence resolve_norming(const std::string& id) {
    if (id.rfind("table:", 0) == 0) {
        const auto columns = read_csv_columns(suffix_after_colon(id), 1);
        return NormingSequence::table(columns.at(0));
    }
    const ParsedId parsed = parse_id(id);
    if (parsed.name == "loglog") return NormingSequence::iterated_log(number_param(parsed, "r", id, 2.0));
    if (parsed.name == "const") return NormingSequence::constant(number_param(parsed, "c", id, 1.0));
    unknown("norming", id, norming_registry());
}

}  // namespace lilbound
