// Copyright 2026 The protocil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "protocil/error.hpp"
#include "protocil/harness.hpp"

namespace protocil {

namespace {

using Json = nlohmann::ordered_json;

Json to_json(const ConfigValue& value) {
  return std::visit([](const auto& v) { return Json(v); }, value);
}

ConfigValue from_json(const Json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw DataError("config_echo values must be scalars");
}

const ConfigValue* find_echo(const RunReport& report, std::string_view key) {
  for (const auto& [k, v] : report.config_echo) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string echo_cell(const RunReport& report, std::string_view key) {
  const ConfigValue* v = find_echo(report, key);
  if (!v) return "";
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else {
          return Json(x).dump();
        }
      },
      *v);
}

std::string number_cell(double v) { return Json(v).dump(); }

}  // namespace

std::string report_to_json(const RunReport& report) {
  Json doc;
  doc["method"] = report.method;
  doc["tool_version"] = report.tool_version;
  Json echo = Json::object();
  for (const auto& [key, value] : report.config_echo) echo[key] = to_json(value);
  doc["config_echo"] = std::move(echo);
  doc["seed"] = report.seed;
  doc["phases"] = Json::array();
  for (const auto& p : report.phases) {
    Json phase;
    phase["t"] = p.t;
    phase["classes"] = p.classes;
    phase["A_t"] = p.accuracy;
    phase["old_acc"] = p.old_accuracy ? Json(*p.old_accuracy) : Json(nullptr);
    phase["new_acc"] = p.new_accuracy;
    phase["eval_count"] = p.eval_count;
    Json per_class = Json::array();
    for (const auto& c : p.per_class) {
      per_class.push_back({{"class", c.class_id}, {"accuracy", c.accuracy}, {"eval_count", c.eval_count}});
    }
    phase["per_class"] = std::move(per_class);
    doc["phases"].push_back(std::move(phase));
  }
  doc["average_accuracy"] = report.average_accuracy;
  return doc.dump(2) + "\n";
}

RunReport report_from_json(std::string_view text) {
  try {
    const Json doc = Json::parse(text);
    RunReport report;
    report.method = doc.at("method").get<std::string>();
    report.tool_version = doc.value("tool_version", "");
    for (const auto& [key, value] : doc.at("config_echo").items()) {
      report.config_echo.emplace_back(key, from_json(value));
    }
    report.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& p : doc.at("phases")) {
      PhaseResult phase;
      phase.t = p.at("t").get<std::size_t>();
      phase.classes = p.at("classes").get<std::vector<std::int64_t>>();
      phase.accuracy = p.at("A_t").get<double>();
      if (!p.at("old_acc").is_null()) phase.old_accuracy = p.at("old_acc").get<double>();
      phase.new_accuracy = p.at("new_acc").get<double>();
      phase.eval_count = p.value("eval_count", std::size_t{0});
      if (p.contains("per_class")) {
        for (const auto& c : p.at("per_class")) {
          phase.per_class.push_back({c.at("class").get<std::int64_t>(), c.at("accuracy").get<double>(),
                                     c.value("eval_count", std::size_t{0})});
        }
      }
      report.phases.push_back(std::move(phase));
    }
    report.average_accuracy = doc.at("average_accuracy").get<double>();
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed run report: ") + e.what());
  }
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write report '" + path.string() + "'");
  out << report_to_json(report);
  if (!out) throw DataError("write failed for report '" + path.string() + "'");
}

RunReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open report '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return report_from_json(buffer.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string reports_to_csv(const std::vector<RunReport>& reports) {
  std::size_t max_phases = 0;
  for (const auto& r : reports) max_phases = std::max(max_phases, r.phases.size());

  std::ostringstream out;
  out << "method,phases,replay,gamma,lambda,seed,average_accuracy,final_accuracy";
  for (std::size_t t = 0; t < max_phases; ++t) out << ",A_" << t;
  out << '\n';
  for (const auto& r : reports) {
    out << r.method << ',' << echo_cell(r, "phases") << ',' << echo_cell(r, "replay") << ','
        << echo_cell(r, "gamma") << ',' << echo_cell(r, "lambda") << ',' << r.seed << ','
        << number_cell(r.average_accuracy) << ','
        << (r.phases.empty() ? std::string() : number_cell(r.phases.back().accuracy));
    for (std::size_t t = 0; t < max_phases; ++t) {
      out << ',';
      if (t < r.phases.size()) out << number_cell(r.phases[t].accuracy);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace protocil
