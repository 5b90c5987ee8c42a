#include "perfmodel/profile_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "perfmodel/errors.hpp"

namespace perfmodel {

namespace {

using json = nlohmann::ordered_json;

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ParseError(field + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(field + ": NaN/Inf not permitted");
  return v;
}

std::int64_t get_integer(const json& j, const std::string& field) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::floor(v)) return std::int64_t(v);
  }
  throw ParseError(field + ": expected an integer");
}

const json& require(const json& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError("missing required key '" + key + "'");
  return *it;
}

}  // namespace

MachineProfile load_profile(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("profile JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("profile JSON: top level must be an object");

  MachineProfile p;
  const json& name = require(doc, "name");
  if (!name.is_string()) throw ParseError("name: expected a string");
  p.name = name.get<std::string>();
  p.latency_s = get_number(require(doc, "latency_s"), "latency_s");
  p.inv_bandwidth_s_per_word =
      get_number(require(doc, "inv_bandwidth_s_per_word"), "inv_bandwidth_s_per_word");
  p.peak_flops_per_core = get_number(require(doc, "peak_flops_per_core"), "peak_flops_per_core");
  p.cores_per_process = get_integer(require(doc, "cores_per_process"), "cores_per_process");

  const json& kernels = require(doc, "kernels");
  if (!kernels.is_array()) throw ParseError("kernels: expected an array");
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    const std::string where = "kernels[" + std::to_string(i) + "]";
    const json& k = kernels[i];
    if (!k.is_object()) throw ParseError(where + ": expected an object");
    EfficiencyCurve curve;
    const json& kname = require(k, "kernel");
    if (!kname.is_string()) throw ParseError(where + ".kernel: expected a string");
    curve.kernel = kname.get<std::string>();
    curve.threads = int(get_integer(require(k, "threads"), where + ".threads"));
    const json& samples = require(k, "samples");
    if (!samples.is_array()) throw ParseError(where + ".samples: expected an array");
    for (std::size_t j = 0; j < samples.size(); ++j) {
      const std::string swhere = where + ".samples[" + std::to_string(j) + "]";
      const json& s = samples[j];
      if (!s.is_array() || s.size() != 2) throw ParseError(swhere + ": expected [dim, time_s]");
      curve.samples.push_back(
          {get_integer(s[0], swhere + "[0]"), get_number(s[1], swhere + "[1]")});
    }
    p.kernels.push_back(std::move(curve));
  }

  const json& avg = require(doc, "calib_avg");
  if (!avg.is_array()) throw ParseError("calib_avg: expected an array");
  for (std::size_t i = 0; i < avg.size(); ++i) {
    const std::string where = "calib_avg[" + std::to_string(i) + "]";
    const json& s = avg[i];
    if (!s.is_array() || s.size() != 2) throw ParseError(where + ": expected [d, factor]");
    p.calib_avg.samples.push_back(
        {get_integer(s[0], where + "[0]"), get_number(s[1], where + "[1]")});
  }

  const json& mx = require(doc, "calib_max");
  if (!mx.is_array()) throw ParseError("calib_max: expected an array");
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const std::string where = "calib_max[" + std::to_string(i) + "]";
    const json& s = mx[i];
    if (!s.is_array() || s.size() != 3) throw ParseError(where + ": expected [p, d, factor]");
    p.calib_max.samples.push_back({get_integer(s[0], where + "[0]"),
                                   get_integer(s[1], where + "[1]"),
                                   get_number(s[2], where + "[2]")});
  }

  p.calib_avg.sort();
  p.calib_max.sort();
  std::sort(p.kernels.begin(), p.kernels.end(),
            [](const EfficiencyCurve& a, const EfficiencyCurve& b) {
              if (a.kernel != b.kernel) return a.kernel < b.kernel;
              return a.threads < b.threads;
            });
  validate_profile(p);
  return p;
}

MachineProfile load_profile_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile file: " + path.string());
  try {
    return load_profile(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_profile(const MachineProfile& p, std::ostream& out) {
  MachineProfile sorted = p;
  sorted.calib_avg.sort();
  sorted.calib_max.sort();
  std::sort(sorted.kernels.begin(), sorted.kernels.end(),
            [](const EfficiencyCurve& a, const EfficiencyCurve& b) {
              if (a.kernel != b.kernel) return a.kernel < b.kernel;
              return a.threads < b.threads;
            });

  json doc;
  doc["name"] = sorted.name;
  doc["latency_s"] = sorted.latency_s;
  doc["inv_bandwidth_s_per_word"] = sorted.inv_bandwidth_s_per_word;
  doc["peak_flops_per_core"] = sorted.peak_flops_per_core;
  doc["cores_per_process"] = sorted.cores_per_process;
  doc["kernels"] = json::array();
  for (const auto& c : sorted.kernels) {
    json k;
    k["kernel"] = c.kernel;
    k["threads"] = c.threads;
    k["samples"] = json::array();
    for (const auto& s : c.samples) k["samples"].push_back({s.dim, s.time_s});
    doc["kernels"].push_back(std::move(k));
  }
  doc["calib_avg"] = json::array();
  for (const auto& s : sorted.calib_avg.samples) doc["calib_avg"].push_back({s.distance, s.factor});
  doc["calib_max"] = json::array();
  for (const auto& s : sorted.calib_max.samples)
    doc["calib_max"].push_back({s.processes, s.distance, s.factor});

  out << doc.dump(2) << '\n';
}

void write_profile_file(const MachineProfile& profile, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path.string());
  write_profile(profile, out);
  if (!out) throw IoError("failed writing profile file: " + path.string());
}

}  // namespace perfmodel
