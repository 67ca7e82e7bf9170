#include "liecast/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace liecast {

using nlohmann::json;

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string render_report_json(
    const std::string& command, const std::string& family, int n,
    const std::string& variant, std::uint64_t seed,
    const std::vector<Verdict>& verdicts,
    const std::vector<std::pair<std::string, std::string>>& artifacts,
    const std::string& extra_json) {
  json doc;
  doc["schema"] = kReportSchema;
  doc["command"] = command;
  doc["family"] = family;
  doc["n"] = n;
  doc["variant"] = variant;
  doc["seed"] = seed;

  json vlist = json::array();
  bool pass = true;
  for (const Verdict& v : verdicts) {
    pass = pass && v.pass;
    json jv;
    jv["name"] = v.name;
    jv["pass"] = v.pass;
    if (!v.note.empty()) jv["note"] = v.note;
    json metrics = json::object();
    for (const auto& [key, value] : v.metrics) metrics[key] = value;
    jv["metrics"] = metrics;
    vlist.push_back(jv);
  }
  doc["verdicts"] = vlist;
  doc["pass"] = pass;

  // The manifest stamps the schema version on every emitted file; the CSVs
  // themselves stay plain so their first line is exactly the pinned header.
  json arts = json::object();
  for (const auto& [name, file] : artifacts)
    arts[name] = {{"file", file}, {"schema", kReportSchema}};
  doc["artifacts"] = arts;

  if (!extra_json.empty()) {
    json extra = json::parse(extra_json, nullptr, false);
    if (extra.is_discarded() || !extra.is_object())
      throw Error("report extras must be a JSON object");
    for (const auto& [key, value] : extra.items()) {
      if (doc.contains(key))
        throw Error("report extra key '" + key + "' is reserved");
      doc[key] = value;
    }
  }
  return doc.dump(2) + "\n";
}

std::vector<std::string> emit_report(const RunResults& r,
                                     const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw Error("cannot create output directory '" + out_dir +
                "': " + ec.message());

  std::vector<std::string> written;
  auto write_file = [&](const std::string& name, const std::string& content) {
    fs::path path = fs::path(out_dir) / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << content;
    f.flush();
    if (!f) throw Error("cannot write '" + path.string() + "'");
    written.push_back(path.string());
  };
  write_file("report.json", r.report_json);
  for (const auto& [name, content] : r.csv_files) write_file(name, content);
  return written;
}

}  // namespace liecast
