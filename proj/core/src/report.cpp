#include "lingrowth/report.hpp"

#include "lingrowth/errors.hpp"
#include "lingrowth/format.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lingrowth {

using nlohmann::json;

namespace {

json epsilon_to_json(const EpsilonRecord& r) {
  json j = {{"epsilon", r.epsilon},
            {"h", r.h},
            {"deviation_at_probe", r.deviation_at_probe},
            {"envelope_value", r.envelope_value},
            {"envelope_satisfied", r.envelope_satisfied},
            {"two_sided_bound_satisfied", r.two_sided_bound_satisfied},
            {"iterations", r.iterations},
            {"converged", r.converged}};
  if (r.uniform_bound) {
    j["uniform_bound"] = *r.uniform_bound;
  }
  if (r.uniform_bound_satisfied) {
    j["uniform_bound_satisfied"] = *r.uniform_bound_satisfied;
  }
  return j;
}

EpsilonRecord epsilon_from_json(const json& j) {
  EpsilonRecord r;
  r.epsilon = j.at("epsilon").get<double>();
  r.h = j.at("h").get<double>();
  r.deviation_at_probe = j.at("deviation_at_probe").get<double>();
  r.envelope_value = j.at("envelope_value").get<double>();
  r.envelope_satisfied = j.at("envelope_satisfied").get<bool>();
  r.two_sided_bound_satisfied = j.at("two_sided_bound_satisfied").get<bool>();
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  if (j.contains("uniform_bound")) {
    r.uniform_bound = j.at("uniform_bound").get<double>();
  }
  if (j.contains("uniform_bound_satisfied")) {
    r.uniform_bound_satisfied = j.at("uniform_bound_satisfied").get<bool>();
  }
  return r;
}

json refinement_to_json(const RefinementRecord& r) {
  json j = {{"n_r", r.n_r},
            {"n_theta", r.n_theta},
            {"h", r.h},
            {"max_error", r.max_error},
            {"iterations", r.iterations}};
  if (r.order) {
    j["order"] = *r.order;
  }
  return j;
}

RefinementRecord refinement_from_json(const json& j) {
  RefinementRecord r;
  r.n_r = j.at("n_r").get<int>();
  r.n_theta = j.at("n_theta").get<int>();
  r.h = j.at("h").get<double>();
  r.max_error = j.at("max_error").get<double>();
  r.iterations = j.at("iterations").get<int>();
  if (j.contains("order")) {
    r.order = j.at("order").get<double>();
  }
  return r;
}

json comparison_to_json(const ComparisonRecord& r) {
  return {{"scenario", r.scenario}, {"trial", r.trial},     {"M", r.M},
          {"status", r.status},     {"max_violation", r.max_violation},
          {"tolerance", r.tolerance}, {"holds", r.holds}};
}

ComparisonRecord comparison_from_json(const json& j) {
  ComparisonRecord r;
  r.scenario = j.at("scenario").get<std::string>();
  r.trial = j.at("trial").get<int>();
  r.M = j.at("M").get<double>();
  r.status = j.at("status").get<std::string>();
  r.max_violation = j.at("max_violation").get<double>();
  r.tolerance = j.at("tolerance").get<double>();
  r.holds = j.at("holds").get<bool>();
  return r;
}

} // namespace

json to_json(const ExperimentReport& report) {
  json records = json::array();
  for (const auto& r : report.epsilon_records) {
    records.push_back(epsilon_to_json(r));
  }
  for (const auto& r : report.refinement_records) {
    records.push_back(refinement_to_json(r));
  }
  for (const auto& r : report.comparison_records) {
    records.push_back(comparison_to_json(r));
  }
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return {{"kind", report.kind},
          {"metadata", report.metadata},
          {"reference", report.reference},
          {"records", records},
          {"convergence_orders", report.convergence_orders},
          {"checks", checks},
          {"complete", report.complete},
          {"passed", report.all_passed()}};
}

ExperimentReport report_from_json(const json& j) {
  ExperimentReport report;
  report.kind = j.at("kind").get<std::string>();
  report.metadata = j.value("metadata", json::object());
  report.reference = j.value("reference", json::object());
  for (const json& r : j.at("records")) {
    if (report.kind == "removability") {
      report.epsilon_records.push_back(epsilon_from_json(r));
    } else if (report.kind == "catenoid") {
      report.refinement_records.push_back(refinement_from_json(r));
    } else if (report.kind == "comparison") {
      report.comparison_records.push_back(comparison_from_json(r));
    } else {
      throw ConfigError("report: unknown kind '" + report.kind + "'");
    }
  }
  report.convergence_orders = j.value("convergence_orders", std::vector<double>{});
  for (const json& c : j.value("checks", json::array())) {
    report.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(),
                             c.value("detail", std::string{})});
  }
  report.complete = j.value("complete", true);
  return report;
}

json canonicalize(const json& j) {
  switch (j.type()) {
  case json::value_t::object: {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
      out[it.key()] = canonicalize(it.value());
    }
    return out;
  }
  case json::value_t::array: {
    json out = json::array();
    for (const auto& v : j) {
      out.push_back(canonicalize(v));
    }
    return out;
  }
  case json::value_t::number_float: {
    const double x = j.get<double>();
    if (!std::isfinite(x)) {
      return format_real(x); // JSON has no infinities
    }
    return round_to_12_digits(x);
  }
  default:
    return j;
  }
}

std::string dump_canonical(const json& j) { return canonicalize(j).dump(2) + "\n"; }

std::string records_csv(const ExperimentReport& report) {
  std::ostringstream out;
  if (report.kind == "removability") {
    out << "epsilon,h,deviation_at_probe,envelope_value,envelope_satisfied,two_sided_bound_satisfied,"
           "uniform_bound,converged\n";
    for (const auto& r : report.epsilon_records) {
      out << format_real(r.epsilon) << ',' << format_real(r.h) << ',' << format_real(r.deviation_at_probe)
          << ',' << format_real(r.envelope_value) << ',' << r.envelope_satisfied << ','
          << r.two_sided_bound_satisfied << ',' << (r.uniform_bound ? format_real(*r.uniform_bound) : "")
          << ',' << r.converged << '\n';
    }
  } else if (report.kind == "catenoid") {
    out << "n_r,n_theta,h,max_error,order\n";
    for (const auto& r : report.refinement_records) {
      out << r.n_r << ',' << r.n_theta << ',' << format_real(r.h) << ',' << format_real(r.max_error) << ','
          << (r.order ? format_real(*r.order) : "") << '\n';
    }
  } else {
    out << "scenario,trial,M,status,max_violation,tolerance,holds\n";
    for (const auto& r : report.comparison_records) {
      out << r.scenario << ',' << r.trial << ',' << format_real(r.M) << ',' << r.status << ','
          << format_real(r.max_violation) << ',' << format_real(r.tolerance) << ',' << r.holds << '\n';
    }
  }
  return out.str();
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  out << text;
  out.close();
  if (!out) {
    throw std::runtime_error("failed writing '" + path.string() + "'");
  }
}

} // namespace

void write_report(const ExperimentReport& report, const std::filesystem::path& path) {
  write_text(path, dump_canonical(to_json(report)));
  std::filesystem::path csv = path;
  csv.replace_extension(".csv");
  write_text(csv, records_csv(report));
}

ExperimentReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  }
  try {
    return report_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed report '" + path.string() + "': " + e.what());
  }
}

} // namespace lingrowth
