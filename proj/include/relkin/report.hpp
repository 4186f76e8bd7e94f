#pragma once

#include <relkin/config.hpp>

#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

namespace relkin {

inline constexpr int kSchemaVersion = 1;

struct Check {
    std::string name;
    double value = 0;
    double threshold = 0;
    std::string relation;  // "<=", ">=", "<", ">", "=="
    bool pass = false;
};

// Collects checks and free-form data for one suite run. Everything except
// the timestamp is a function of the inputs.
class Report {
public:
    Report(std::string suite, const RunConfig& cfg) : suite_(std::move(suite)), cfg_(cfg) {}

    bool check(const std::string& name, double value, const std::string& rel, double threshold) {
        bool ok = false;
        if (rel == "<=") ok = value <= threshold;
        else if (rel == ">=") ok = value >= threshold;
        else if (rel == "<") ok = value < threshold;
        else if (rel == ">") ok = value > threshold;
        else if (rel == "==") ok = value == threshold;
        checks_.push_back({name, value, threshold, rel, ok});
        return ok;
    }

    nlohmann::ordered_json& data() { return data_; }
    const std::vector<Check>& checks() const { return checks_; }

    bool passed() const {
        for (const auto& c : checks_)
            if (!c.pass) return false;
        return true;
    }

    nlohmann::ordered_json to_json(bool withTimestamp = true) const {
        nlohmann::ordered_json j;
        j["schemaVersion"] = kSchemaVersion;
        j["suite"] = suite_;
        j["config"] = to_config_text(cfg_);
        j["passed"] = passed();
        auto& cs = j["checks"] = nlohmann::ordered_json::array();
        for (const auto& c : checks_)
            cs.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"threshold", c.threshold},
                          {"pass", c.pass}});
        j["data"] = data_;
        if (withTimestamp) {
            const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            char buf[32];
            std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
            j["timestamp"] = buf;
        }
        return j;
    }

    // CSV: one row per check.
    std::string to_csv() const {
        std::string s = "name,value,relation,threshold,pass\n";
        for (const auto& c : checks_) {
            nlohmann::json v = c.value, t = c.threshold;
            s += c.name + "," + v.dump() + "," + c.relation + "," + t.dump() + "," + (c.pass ? "1" : "0") + "\n";
        }
        return s;
    }

    void write(const std::string& path, const std::string& format) const {
        std::ofstream f(path);
        if (!f) throw ConfigError("cannot write report to '" + path + "'");
        if (format == "csv") f << to_csv();
        else f << to_json().dump(2) << "\n";
    }

private:
    std::string suite_;
    RunConfig cfg_;
    std::vector<Check> checks_;
    nlohmann::ordered_json data_ = nlohmann::ordered_json::object();
};

} // namespace relkin
