#include "idp/config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace idp {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) parts.push_back(trim(item));
    if (!s.empty() && s.back() == sep) parts.push_back("");
    return parts;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int parse_int(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("invalid integer for '" + key + "': " + s);
    }
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("invalid number for '" + key + "': " + s);
    }
}

std::string join_ints(const std::vector<int>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        os << v[i];
    }
    return os.str();
}

std::string join_strings(const std::vector<std::string>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        os << v[i];
    }
    return os.str();
}

} // namespace

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    if (trim(text).empty()) return values;
    for (const std::string& part : split(text, ',')) {
        const auto dash = part.find('-', 1); // allow a leading minus sign
        if (dash != std::string::npos) {
            const int lo = parse_int(trim(part.substr(0, dash)), "list");
            const int hi = parse_int(trim(part.substr(dash + 1)), "list");
            if (hi < lo) throw ValidationError("descending range in list: " + part);
            for (int v = lo; v <= hi; ++v) values.push_back(v);
        } else {
            values.push_back(parse_int(part, "list"));
        }
    }
    return values;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig config;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line is not 'key = value': " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "n_actions")
            config.n_actions = parse_int(value, key);
        else if (key == "n_incentives")
            config.n_incentives = parse_int(value, key);
        else if (key == "eta")
            config.eta = parse_double(value, key);
        else if (key == "default_cost")
            config.default_cost = parse_double(value, key);
        else if (key == "horizons")
            config.horizons = parse_int_list(value);
        else if (key == "gamma")
            config.gamma = parse_double(value, key);
        else if (key == "prior")
            config.prior = value;
        else if (key == "algorithms")
            config.algorithms = split(value, ',');
        else if (key == "runs")
            config.runs = parse_int(value, key);
        else if (key == "rounds")
            config.rounds = parse_int(value, key);
        else if (key == "seed") {
            try {
                std::size_t pos = 0;
                config.seed = std::stoull(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw ValidationError("invalid integer for 'seed': " + value);
            }
        }
        else if (key == "output")
            config.output = value;
        else if (key == "grid_actions")
            config.grid_actions = parse_int_list(value);
        else if (key == "grid_incentives")
            config.grid_incentives = parse_int_list(value);
        else
            throw ValidationError("unknown config key: " + key);
    }
    return config;
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "n_actions = " << c.n_actions << '\n';
    os << "n_incentives = " << c.n_incentives << '\n';
    os << "eta = " << format_double(c.eta) << '\n';
    os << "default_cost = " << format_double(c.default_cost) << '\n';
    os << "horizons = " << join_ints(c.horizons) << '\n';
    os << "gamma = " << format_double(c.gamma) << '\n';
    os << "prior = " << c.prior << '\n';
    os << "algorithms = " << join_strings(c.algorithms) << '\n';
    os << "runs = " << c.runs << '\n';
    os << "rounds = " << c.rounds << '\n';
    os << "seed = " << c.seed << '\n';
    os << "output = " << c.output << '\n';
    os << "grid_actions = " << join_ints(c.grid_actions) << '\n';
    os << "grid_incentives = " << join_ints(c.grid_incentives) << '\n';
    return os.str();
}

IdpModel config_model(const ExperimentConfig& config) {
    if (config.n_actions < 1 || config.n_incentives < 1)
        throw ValidationError("n_actions and n_incentives must be positive");
    if (!(config.eta > 0.0)) throw ValidationError("eta must be positive");
    std::vector<double> costs(config.n_actions);
    for (int n = 0; n < config.n_actions; ++n)
        costs[n] = std::pow(static_cast<double>(n + 1) / config.n_actions, config.eta);
    std::vector<double> ladder(config.n_incentives);
    for (int k = 0; k < config.n_incentives; ++k)
        ladder[k] = static_cast<double>(k + 1) / config.n_incentives;
    return build_model(std::move(costs), config.default_cost, std::move(ladder),
                       config.gamma);
}

JointPrior config_prior(const ExperimentConfig& config) {
    if (config.prior == "uniform")
        return uniform_monotone_prior(config.n_actions, config.n_incentives);
    // Inline table: "(t1,...,tN):weight;..." with 1-based ladder indices.
    std::vector<JointPrior::Entry> entries;
    for (const std::string& item : split(config.prior, ';')) {
        if (item.empty()) continue;
        const auto open = item.find('(');
        const auto close = item.find(')');
        const auto colon = item.find(':', close == std::string::npos ? 0 : close);
        if (open == std::string::npos || close == std::string::npos ||
            colon == std::string::npos)
            throw ValidationError("prior entry is not '(t1,..,tN):w': " + item);
        std::vector<int> tuple;
        for (const std::string& idx : split(item.substr(open + 1, close - open - 1), ','))
            tuple.push_back(parse_int(idx, "prior") - 1);
        entries.push_back({std::move(tuple), parse_double(trim(item.substr(colon + 1)), "prior")});
    }
    return JointPrior(config.n_actions, config.n_incentives, std::move(entries));
}

} // namespace idp
