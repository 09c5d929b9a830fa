#include "core/manifest.hpp"

#include <iomanip>
#include <sstream>

#include "core/dataset_io.hpp"
#include "core/error.hpp"

namespace codepoison {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json totals_json(const ManifestTotals& t) {
  ordered_json j;
  j["total_samples"] = t.total_samples;
  j["eligible"] = t.eligible;
  j["requested"] = t.requested;
  j["quota"] = t.quota;
  j["poisoned"] = t.poisoned;
  j["skipped"] = t.skipped;
  return j;
}

ordered_json site_json(const PoisonSite& site) {
  ordered_json j = ordered_json::object();
  if (!site.snippet.empty()) j["snippet"] = site.snippet;
  if (!site.splices.empty()) {
    ordered_json arr = ordered_json::array();
    for (const auto& s : site.splices) {
      ordered_json e;
      e["field"] = s.field;
      e["unit"] = s.unit;
      e["index"] = s.index;
      e["line"] = s.line;
      e["offset"] = s.offset;
      e["inserted"] = s.inserted;
      arr.push_back(std::move(e));
    }
    j["splices"] = std::move(arr);
  }
  if (site.rename) {
    ordered_json r;
    r["from"] = site.rename->from;
    r["to"] = site.rename->to;
    r["occurrences"] = site.rename->occurrences;
    j["rename"] = std::move(r);
  }
  return j;
}

ordered_json record_json(const ManifestRecord& r) {
  ordered_json j;
  j["position"] = r.position;
  j["original_idx"] = r.original_idx;
  if (!r.new_idx.empty()) j["new_idx"] = r.new_idx;
  if (!r.asr_idx.empty()) j["asr_idx"] = r.asr_idx;
  j["status"] = r.status == PoisonStatus::Poisoned ? "poisoned" : "skipped";
  if (r.skip) j["skip_reason"] = to_string(*r.skip);
  if (!r.trigger_id.empty()) j["trigger_id"] = r.trigger_id;
  if (r.status == PoisonStatus::Poisoned) j["site"] = site_json(r.site);
  return j;
}

ordered_json section_json(const ManifestSection& s) {
  ordered_json j;
  j["totals"] = totals_json(s.totals);
  ordered_json records = ordered_json::array();
  for (const auto& r : s.records) records.push_back(record_json(r));
  j["records"] = std::move(records);
  return j;
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedManifest, what);
}

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing '") + key + "'");
  return j.at(key);
}

std::size_t get_size(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    malformed(std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string get_string(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_string()) malformed(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::string get_optional_string(const json& j, const char* key) {
  return j.contains(key) ? get_string(j, key) : std::string();
}

ManifestTotals totals_from(const json& j) {
  ManifestTotals t;
  t.total_samples = get_size(j, "total_samples");
  t.eligible = get_size(j, "eligible");
  t.requested = get_size(j, "requested");
  t.quota = get_size(j, "quota");
  t.poisoned = get_size(j, "poisoned");
  t.skipped = get_size(j, "skipped");
  return t;
}

PoisonSite site_from(const json& j) {
  PoisonSite site;
  if (!j.is_object()) malformed("'site' must be an object");
  site.snippet = get_optional_string(j, "snippet");
  if (j.contains("splices")) {
    const json& arr = j.at("splices");
    if (!arr.is_array()) malformed("'splices' must be an array");
    for (const auto& e : arr) {
      Splice s;
      s.field = get_string(e, "field");
      s.unit = get_string(e, "unit");
      s.index = get_size(e, "index");
      s.line = get_size(e, "line");
      s.offset = get_size(e, "offset");
      s.inserted = get_string(e, "inserted");
      site.splices.push_back(std::move(s));
    }
  }
  if (j.contains("rename")) {
    const json& r = j.at("rename");
    site.rename = Rename{get_string(r, "from"), get_string(r, "to"), get_size(r, "occurrences")};
  }
  return site;
}

ManifestSection section_from(const json& j) {
  ManifestSection s;
  s.totals = totals_from(member(j, "totals"));
  const json& records = member(j, "records");
  if (!records.is_array()) malformed("'records' must be an array");
  for (const auto& e : records) {
    ManifestRecord r;
    r.position = get_size(e, "position");
    r.original_idx = get_string(e, "original_idx");
    r.new_idx = get_optional_string(e, "new_idx");
    r.asr_idx = get_optional_string(e, "asr_idx");
    const std::string status = get_string(e, "status");
    if (status == "poisoned") {
      r.status = PoisonStatus::Poisoned;
      r.site = site_from(member(e, "site"));
    } else if (status == "skipped") {
      r.status = PoisonStatus::Skipped;
      const auto reason = parse_skip_reason(get_string(e, "skip_reason"));
      if (!reason) malformed("unknown skip_reason");
      r.skip = reason;
    } else {
      malformed("unknown status '" + status + "'");
    }
    r.trigger_id = get_optional_string(e, "trigger_id");
    s.records.push_back(std::move(r));
  }
  return s;
}

std::string site_summary(const ManifestRecord& r) {
  if (r.status != PoisonStatus::Poisoned) return r.skip ? std::string(to_string(*r.skip)) : "-";
  std::string out;
  if (!r.site.snippet.empty()) out += r.site.snippet + ":";
  for (const auto& s : r.site.splices) {
    if (!out.empty() && out.back() != ':') out += ' ';
    out += s.field + "@" + s.unit + "#" + std::to_string(s.index) + "(line " +
           std::to_string(s.line) + ")";
  }
  if (r.site.rename) {
    out += "rename " + r.site.rename->from + "->" + r.site.rename->to + " x" +
           std::to_string(r.site.rename->occurrences);
  }
  return out;
}

void render_section(std::ostringstream& out, const char* title, const ManifestSection& s) {
  const auto& t = s.totals;
  out << title << ": total=" << t.total_samples << " eligible=" << t.eligible
      << " requested=" << t.requested << " quota=" << t.quota << " poisoned=" << t.poisoned
      << " skipped=" << t.skipped << '\n';
  out << std::left << std::setw(10) << "position" << std::setw(16) << "idx" << std::setw(16)
      << "new_idx" << std::setw(10) << "status" << std::setw(22) << "trigger" << "site" << '\n';
  for (const auto& r : s.records) {
    out << std::left << std::setw(10) << r.position << std::setw(16) << r.original_idx
        << std::setw(16) << (r.new_idx.empty() ? (r.asr_idx.empty() ? "-" : r.asr_idx) : r.new_idx)
        << std::setw(10) << (r.status == PoisonStatus::Poisoned ? "poisoned" : "skipped")
        << std::setw(22) << (r.trigger_id.empty() ? "-" : r.trigger_id) << site_summary(r)
        << '\n';
  }
}

}  // namespace

ordered_json to_json(const PoisonManifest& m) {
  ordered_json j;
  j["manifest_version"] = m.manifest_version;
  j["tool_version"] = m.tool_version;
  j["task"] = to_string(m.task);
  j["attack"] = to_string(m.attack);
  j["config"] = m.config;
  if (m.task == Task::Nl2Code) {
    j["target_stmt"] = m.target_stmt;
  } else {
    j["target_label"] = m.target_label;
  }
  j["train"] = section_json(m.train);
  if (m.asr_eval) j["asr_eval"] = section_json(*m.asr_eval);
  return j;
}

PoisonManifest manifest_from_json(const json& j) {
  if (!j.is_object()) malformed("manifest must be a JSON object");
  PoisonManifest m;
  const json& version = member(j, "manifest_version");
  if (!version.is_number_integer()) malformed("'manifest_version' must be an integer");
  m.manifest_version = version.get<int>();
  if (m.manifest_version != kManifestVersion) {
    malformed("unsupported manifest_version " + std::to_string(m.manifest_version));
  }
  m.tool_version = get_string(j, "tool_version");
  const auto task = parse_task(get_string(j, "task"));
  const auto attack = parse_attack(get_string(j, "attack"));
  if (!task || !attack || task_of(*attack) != *task) malformed("bad task/attack");
  m.task = *task;
  m.attack = *attack;
  m.config = ordered_json(member(j, "config"));
  if (m.task == Task::Nl2Code) {
    m.target_stmt = get_string(j, "target_stmt");
  } else {
    const json& label = member(j, "target_label");
    if (!label.is_number_integer()) malformed("'target_label' must be an integer");
    m.target_label = label.get<int>();
  }
  m.train = section_from(member(j, "train"));
  if (j.contains("asr_eval")) m.asr_eval = section_from(j.at("asr_eval"));
  return m;
}

std::string serialize_manifest(const PoisonManifest& manifest) {
  return to_json(manifest).dump(2, ' ', false, json::error_handler_t::strict) + "\n";
}

void write_manifest(const PoisonManifest& manifest, const std::filesystem::path& path) {
  write_file(path, serialize_manifest(manifest));
}

PoisonManifest read_manifest(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  json j;
  try {
    j = json::parse(content);
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  try {
    return manifest_from_json(j);
  } catch (const json::exception& e) {
    malformed(e.what());
  }
}

std::string render_manifest_table(const PoisonManifest& m) {
  std::ostringstream out;
  out << "manifest v" << m.manifest_version << " (" << m.tool_version << ")  task=" << to_string(m.task)
      << " attack=" << to_string(m.attack);
  if (m.config.contains("rate")) out << " rate=" << m.config["rate"].dump();
  if (m.config.contains("seed")) out << " seed=" << m.config["seed"].dump();
  out << '\n';
  render_section(out, "train", m.train);
  if (m.asr_eval) {
    out << '\n';
    render_section(out, "asr_eval", *m.asr_eval);
  }
  return out.str();
}

std::vector<std::string> triggered_asr_ids(const PoisonManifest& m) {
  std::vector<std::string> ids;
  if (!m.asr_eval) return ids;
  for (const auto& r : m.asr_eval->records) {
    if (r.status == PoisonStatus::Poisoned) ids.push_back(r.asr_idx);
  }
  return ids;
}

}  // namespace codepoison
