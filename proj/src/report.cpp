#include <charconv>
#include <fstream>
#include <sstream>

#include "placenav/eval.hpp"

namespace placenav::eval {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("cannot format double");
  return std::string(buf, end);
}

ReportFormat parse_format(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw InvalidArgument("unknown format '" + name + "' (expected json|csv)");
}

namespace {

ordered_json fit_json(const LinearFit& f) {
  ordered_json j;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["r_squared"] = f.r_squared;
  return j;
}

LinearFit fit_from_json(const nlohmann::json& j) {
  return {j.at("slope").get<double>(), j.at("intercept").get<double>(),
          j.at("r_squared").get<double>()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw FormatError(FormatErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace

ordered_json to_json(const BenchReport& report) {
  ordered_json j;
  j["dim"] = report.dim;
  j["per_pair_flops"] = report.per_pair_flops;
  j["repetitions"] = report.repetitions;
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    ordered_json o;
    o["candidates"] = r.candidates;
    o["embedding_ns"] = r.embedding_ns;
    o["pairwise_ns"] = r.pairwise_ns;
    o["pair_evaluations"] = r.pair_evaluations;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  j["embedding_fit"] = fit_json(report.embedding_fit);
  j["pairwise_fit"] = fit_json(report.pairwise_fit);
  return j;
}

BenchReport bench_report_from_json(const nlohmann::json& j) {
  BenchReport report;
  try {
    report.dim = j.at("dim").get<std::size_t>();
    report.per_pair_flops = j.at("per_pair_flops").get<std::uint64_t>();
    report.repetitions = j.at("repetitions").get<std::size_t>();
    for (const auto& o : j.at("rows")) {
      report.rows.push_back({o.at("candidates").get<std::size_t>(), o.at("embedding_ns").get<double>(),
                             o.at("pairwise_ns").get<double>(),
                             o.at("pair_evaluations").get<std::size_t>()});
    }
    report.embedding_fit = fit_from_json(j.at("embedding_fit"));
    report.pairwise_fit = fit_from_json(j.at("pairwise_fit"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatErrorKind::kMalformedMetadata, std::string("bench report: ") + e.what());
  }
  return report;
}

std::string to_csv(const BenchReport& report) {
  std::ostringstream out;
  out << kBenchCsvHeader << "\n";
  for (const auto& r : report.rows) {
    out << r.candidates << ',' << format_double(r.embedding_ns) << ',' << format_double(r.pairwise_ns)
        << ',' << r.pair_evaluations << "\n";
  }
  return out.str();
}

ordered_json to_json(const std::vector<sim::SummaryRow>& summary) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : summary) {
    ordered_json o;
    o["selector"] = r.selector;
    o["scenario"] = r.scenario;
    o["episodes"] = r.episodes;
    o["success_rate"] = r.success_rate;
    rows.push_back(std::move(o));
  }
  return rows;
}

std::string to_csv(const std::vector<sim::SummaryRow>& summary) {
  std::ostringstream out;
  out << kSummaryCsvHeader << "\n";
  for (const auto& r : summary) {
    out << r.selector << ',' << r.scenario << ',' << r.episodes << ',' << format_double(r.success_rate)
        << "\n";
  }
  return out.str();
}

std::string to_jsonl(const std::vector<sim::EpisodeRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    ordered_json o;
    o["world_id"] = r.world_id;
    o["selector"] = r.selector;
    o["scenario"] = r.scenario;
    o["seed"] = r.seed;
    o["success"] = r.success;
    o["steps"] = r.steps;
    o["failure_reason"] = r.failure_reason ? ordered_json(sim::to_string(*r.failure_reason)) : ordered_json();
    o["mean_loc_error"] = r.mean_loc_error;
    out += o.dump();
    out += '\n';
  }
  return out;
}

void emit_report(const BenchReport& report, const fs::path& path, ReportFormat format,
                 const std::optional<std::string>& config_hash) {
  if (report.rows.empty()) throw InvalidArgument("refusing to emit an empty benchmark report");
  if (format == ReportFormat::kCsv) {
    write_text(path, to_csv(report));
    return;
  }
  ordered_json j;
  if (config_hash) j["config_hash"] = *config_hash;
  const ordered_json body = to_json(report);
  for (const auto& [k, v] : body.items()) j[k] = v;
  write_text(path, j.dump(2) + "\n");
}

void emit_report(const std::vector<sim::SummaryRow>& summary, const fs::path& path, ReportFormat format,
                 const std::optional<std::string>& config_hash) {
  if (summary.empty()) throw InvalidArgument("refusing to emit an empty batch summary");
  if (format == ReportFormat::kCsv) {
    write_text(path, to_csv(summary));
    return;
  }
  ordered_json j;
  if (config_hash) j["config_hash"] = *config_hash;
  j["rows"] = to_json(summary);
  write_text(path, j.dump(2) + "\n");
}

void emit_records(const std::vector<sim::EpisodeRecord>& records, const fs::path& path) {
  if (records.empty()) throw InvalidArgument("refusing to emit an empty record file");
  write_text(path, to_jsonl(records));
}

}  // namespace placenav::eval
