#pragma once

// Structured reports for the CLI: a single top-level object
// {command, config, results, errors, meta} rendered as JSON (sorted keys,
// hence byte-stable for a fixed config), as CSV (results only, flattened),
// or as human-readable text.  Reports carry no timing fields.

#include <json.hpp>

#include <iostream>
#include <string>

namespace bettilab {

inline const char* kVersion = "0.1.0";

class Report {
public:
    explicit Report(std::string command) {
        j_["command"] = std::move(command);
        j_["config"] = nlohmann::json::object();
        j_["results"] = nlohmann::json::object();
        j_["errors"] = nlohmann::json::array();
        j_["meta"] = {{"version", kVersion}};
    }

    nlohmann::json& config() { return j_["config"]; }
    nlohmann::json& results() { return j_["results"]; }
    nlohmann::json& meta() { return j_["meta"]; }

    void add_error(const std::string& code, const std::string& category,
                   const std::string& message) {
        j_["errors"].push_back(
            {{"code", code}, {"category", category}, {"message", message}});
    }

    const nlohmann::json& body() const { return j_; }

    void emit(const std::string& format, std::ostream& os) const {
        if (format == "json") {
            os << j_.dump(2) << "\n";
        } else if (format == "csv") {
            emit_csv(os);
        } else {
            emit_text(os);
        }
    }

private:
    static void flatten(const std::string& prefix, const nlohmann::json& v,
                        std::vector<std::pair<std::string, std::string>>& out) {
        if (v.is_object()) {
            for (auto it = v.begin(); it != v.end(); ++it)
                flatten(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value(), out);
        } else if (v.is_array()) {
            for (std::size_t i = 0; i < v.size(); ++i)
                flatten(prefix + "[" + std::to_string(i) + "]", v[i], out);
        } else {
            out.emplace_back(prefix, v.is_string() ? v.get<std::string>() : v.dump());
        }
    }

    void emit_csv(std::ostream& os) const {
        std::vector<std::pair<std::string, std::string>> rows;
        flatten("", j_["results"], rows);
        os << "key,value\n";
        for (const auto& [k, v] : rows) os << k << "," << v << "\n";
    }

    void emit_text(std::ostream& os) const {
        os << "# " << j_["command"].get<std::string>() << "\n";
        std::vector<std::pair<std::string, std::string>> rows;
        flatten("", j_["results"], rows);
        for (const auto& [k, v] : rows) os << k << " = " << v << "\n";
        for (const auto& e : j_["errors"])
            os << "error: " << e["code"].get<std::string>() << ": "
               << e["message"].get<std::string>() << "\n";
    }

    nlohmann::json j_;
};

} // namespace bettilab
