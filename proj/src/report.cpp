#include "mfk/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "mfk/errors.hpp"
#include "mfk/io.hpp"

namespace mfk::report {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_num(const std::string& s, std::string_view context) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw Error(ErrorCode::ConfigParse, std::string(context) + ": bad number '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, std::string_view context) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size())
    throw Error(ErrorCode::ConfigParse, std::string(context) + ": bad integer '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

// "# key: value" header lines and the data rows below the column line.
struct ParsedCsv {
  std::map<std::string, std::string> header;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

ParsedCsv parse_csv(const std::string& text) {
  ParsedCsv out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon != std::string::npos && colon > 2) out.header[line.substr(2, colon - 2)] = line.substr(colon + 2);
      continue;
    }
    if (out.columns.empty()) {
      out.columns = split(line, ',');
      continue;
    }
    auto fields = split(line, ',');
    if (fields.size() != out.columns.size()) throw Error(ErrorCode::ConfigParse, "csv row has wrong field count");
    out.rows.push_back(std::move(fields));
  }
  return out;
}

const std::string& header_field(const ParsedCsv& csv, const std::string& key) {
  auto it = csv.header.find(key);
  if (it == csv.header.end()) throw Error(ErrorCode::ConfigParse, "csv header lacks '" + key + "'");
  return it->second;
}

Provenance provenance_from_csv(const ParsedCsv& csv) {
  return Provenance{header_field(csv, "version"), header_field(csv, "config_hash"), header_field(csv, "config")};
}

std::string provenance_header(const Provenance& p) {
  return "# version: " + p.version + "\n# config_hash: " + p.config_hash + "\n# config: " + p.config_json + "\n";
}

json provenance_to_json(const Provenance& p) {
  return {{"version", p.version}, {"config_hash", p.config_hash}, {"config", json::parse(p.config_json)}};
}

Provenance provenance_from_json(const json& j) {
  return Provenance{j.at("version").get<std::string>(), j.at("config_hash").get<std::string>(), j.at("config").dump()};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigParse, std::string("report: ") + e.what());
  }
}

}  // namespace

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  throw Error(ErrorCode::InvalidArgument, "format must be csv or json, got '" + std::string(text) + "'");
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Provenance make_provenance(const json& resolved_config) {
  const std::string dump = resolved_config.dump();
  return Provenance{MFK_VERSION, fnv1a_hex(dump), dump};
}

json to_json(const ConvergenceReport& r) {
  json stats = json::array();
  for (const auto& s : r.stats) stats.push_back({{"M", s.m}, {"median", s.median}, {"q25", s.q25}, {"q75", s.q75}});
  return {{"report", "convergence"},
          {"m_grid", r.m_grid},
          {"stats", stats},
          {"slope", r.slope ? json(*r.slope) : json(nullptr)},
          {"limit_value", r.limit_value},
          {"seeds", r.seeds},
          {"note", r.note},
          {"provenance", provenance_to_json(r.provenance)}};
}

ConvergenceReport convergence_from_json(const json& j) {
  return guarded([&] {
    ConvergenceReport r;
    r.m_grid = j.at("m_grid").get<std::vector<std::int64_t>>();
    for (const auto& s : j.at("stats"))
      r.stats.push_back({s.at("M").get<std::int64_t>(), s.at("median").get<double>(), s.at("q25").get<double>(),
                         s.at("q75").get<double>()});
    if (!j.at("slope").is_null()) r.slope = j.at("slope").get<double>();
    r.limit_value = j.at("limit_value").get<double>();
    r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    r.note = j.at("note").get<std::string>();
    r.provenance = provenance_from_json(j.at("provenance"));
    return r;
  });
}

std::string to_csv(const ConvergenceReport& r) {
  std::string out = "# mfk convergence report\n" + provenance_header(r.provenance);
  out += "# slope: " + (r.slope ? num(*r.slope) : std::string("none")) + "\n";
  std::string seeds;
  for (auto s : r.seeds) seeds += (seeds.empty() ? "" : " ") + std::to_string(s);
  out += "# limit_value: " + num(r.limit_value) + "\n# seeds: " + seeds;
  out += "\n# note: " + one_line(r.note) + "\n";
  out += "# columns: M = particle count; median, q25, q75 = quantiles over seeds of |k_M(x, x') - k(mu, nu)|\n";
  out += "M,median,q25,q75\n";
  for (const auto& s : r.stats)
    out += std::to_string(s.m) + "," + num(s.median) + "," + num(s.q25) + "," + num(s.q75) + "\n";
  return out;
}

ConvergenceReport convergence_from_csv(const std::string& text) {
  const auto csv = parse_csv(text);
  if (csv.columns != std::vector<std::string>{"M", "median", "q25", "q75"})
    throw Error(ErrorCode::ConfigParse, "not a convergence report csv");
  ConvergenceReport r;
  r.provenance = provenance_from_csv(csv);
  const auto& slope = header_field(csv, "slope");
  if (slope != "none") r.slope = parse_num(slope, "slope");
  r.limit_value = parse_num(header_field(csv, "limit_value"), "limit_value");
  std::istringstream seeds(header_field(csv, "seeds") + " ");
  for (std::uint64_t s; seeds >> s;) r.seeds.push_back(s);
  r.note = header_field(csv, "note");
  for (const auto& row : csv.rows) {
    ErrorStats s{parse_int(row[0], "M"), parse_num(row[1], "median"), parse_num(row[2], "q25"), parse_num(row[3], "q75")};
    r.m_grid.push_back(s.m);
    r.stats.push_back(s);
  }
  return r;
}

std::string to_dat(const ConvergenceReport& r) {
  std::string out = "# M median q25 q75\n";
  for (const auto& s : r.stats)
    out += std::to_string(s.m) + " " + num(s.median) + " " + num(s.q25) + " " + num(s.q75) + "\n";
  return out;
}

json to_json(const TransferReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"M", row.m},
                    {"rmse", row.rmse},
                    {"baseline_rmse", row.baseline_rmse},
                    {"mean_field_gap", row.mean_field_gap ? json(*row.mean_field_gap) : json(nullptr)}});
  return {{"report", "transfer"},
          {"train_m", r.train_m},
          {"n_train", r.n_train},
          {"n_test", r.n_test},
          {"lambda", r.lambda},
          {"jitter", r.jitter},
          {"in_distribution_rmse", r.in_distribution_rmse},
          {"rows", rows},
          {"provenance", provenance_to_json(r.provenance)}};
}

TransferReport transfer_from_json(const json& j) {
  return guarded([&] {
    TransferReport r;
    r.train_m = j.at("train_m").get<std::int64_t>();
    r.n_train = j.at("n_train").get<int>();
    r.n_test = j.at("n_test").get<int>();
    r.lambda = j.at("lambda").get<double>();
    r.jitter = j.at("jitter").get<double>();
    r.in_distribution_rmse = j.at("in_distribution_rmse").get<double>();
    for (const auto& row : j.at("rows")) {
      TransferRow t{row.at("M").get<std::int64_t>(), row.at("rmse").get<double>(), row.at("baseline_rmse").get<double>(),
                    std::nullopt};
      if (!row.at("mean_field_gap").is_null()) t.mean_field_gap = row.at("mean_field_gap").get<double>();
      r.rows.push_back(t);
    }
    r.provenance = provenance_from_json(j.at("provenance"));
    return r;
  });
}

std::string to_csv(const TransferReport& r) {
  std::string out = "# mfk transfer report\n" + provenance_header(r.provenance);
  out += "# train_m: " + std::to_string(r.train_m) + "\n# n_train: " + std::to_string(r.n_train) +
         "\n# n_test: " + std::to_string(r.n_test) + "\n# lambda: " + num(r.lambda) + "\n# jitter: " + num(r.jitter) +
         "\n# in_distribution_rmse: " + num(r.in_distribution_rmse) + "\n";
  out += "# columns: M = test particle count; rmse = fitted model vs f_M; baseline_rmse = constant predictor;"
         " mean_field_gap = median |f_M - f(law)|, empty if unknown\n";
  out += "M,rmse,baseline_rmse,mean_field_gap\n";
  for (const auto& row : r.rows)
    out += std::to_string(row.m) + "," + num(row.rmse) + "," + num(row.baseline_rmse) + "," +
           (row.mean_field_gap ? num(*row.mean_field_gap) : std::string()) + "\n";
  return out;
}

TransferReport transfer_from_csv(const std::string& text) {
  const auto csv = parse_csv(text);
  if (csv.columns != std::vector<std::string>{"M", "rmse", "baseline_rmse", "mean_field_gap"})
    throw Error(ErrorCode::ConfigParse, "not a transfer report csv");
  TransferReport r;
  r.provenance = provenance_from_csv(csv);
  r.train_m = parse_int(header_field(csv, "train_m"), "train_m");
  r.n_train = static_cast<int>(parse_int(header_field(csv, "n_train"), "n_train"));
  r.n_test = static_cast<int>(parse_int(header_field(csv, "n_test"), "n_test"));
  r.lambda = parse_num(header_field(csv, "lambda"), "lambda");
  r.jitter = parse_num(header_field(csv, "jitter"), "jitter");
  r.in_distribution_rmse = parse_num(header_field(csv, "in_distribution_rmse"), "in_distribution_rmse");
  for (const auto& row : csv.rows) {
    TransferRow t{parse_int(row[0], "M"), parse_num(row[1], "rmse"), parse_num(row[2], "baseline_rmse"), std::nullopt};
    if (!row[3].empty()) t.mean_field_gap = parse_num(row[3], "mean_field_gap");
    r.rows.push_back(t);
  }
  return r;
}

std::string serialize(const ConvergenceReport& r, Format f) {
  return f == Format::Csv ? to_csv(r) : to_json(r).dump(2) + "\n";
}

std::string serialize(const TransferReport& r, Format f) {
  return f == Format::Csv ? to_csv(r) : to_json(r).dump(2) + "\n";
}

void emit_report(const ConvergenceReport& r, const std::filesystem::path& path, Format f) {
  io::write_text_file(path, serialize(r, f));
}

void emit_report(const TransferReport& r, const std::filesystem::path& path, Format f) {
  io::write_text_file(path, serialize(r, f));
}

ConvergenceReport read_convergence_report(const std::filesystem::path& path) {
  const auto text = read_file(path);
  if (!text.empty() && text[0] == '#') return convergence_from_csv(text);
  return convergence_from_json(guarded([&] { return json::parse(text); }));
}

TransferReport read_transfer_report(const std::filesystem::path& path) {
  const auto text = read_file(path);
  if (!text.empty() && text[0] == '#') return transfer_from_csv(text);
  return transfer_from_json(guarded([&] { return json::parse(text); }));
}

json to_json(const McShaneCheckReport& r, const Provenance& p) {
  return {{"report", "mcshane_check"},
          {"max_deviation", r.max_deviation},
          {"deviations", r.deviations},
          {"modulus_violation", r.modulus_violation},
          {"n_pairs", r.n_pairs},
          {"n_decoys", r.n_decoys},
          {"modulus_scale", r.modulus_scale},
          {"provenance", provenance_to_json(p)}};
}

std::string to_csv(const McShaneCheckReport& r, const Provenance& p) {
  std::string out = "# mfk mcshane check\n" + provenance_header(p);
  out += "# max_deviation: " + num(r.max_deviation) + "\n# modulus_violation: " +
         (r.modulus_violation ? "true" : "false") + "\n# n_decoys: " + std::to_string(r.n_decoys) +
         "\n# modulus_scale: " + num(r.modulus_scale) + "\n";
  out += "# columns: pair = index; deviation = |extension - k_M(pair)|\npair,deviation\n";
  for (std::size_t i = 0; i < r.deviations.size(); ++i) out += std::to_string(i) + "," + num(r.deviations[i]) + "\n";
  return out;
}

json to_json(const ModulusEstimate& e, const Provenance& p) {
  json samples = json::array();
  for (const auto& s : e.samples) samples.push_back({s.distance, s.deviation});
  return {{"report", "modulus"},
          {"samples", samples},
          {"envelope", io::modulus_to_json(e.envelope)},
          {"provenance", provenance_to_json(p)}};
}

std::string to_csv(const ModulusEstimate& e, const Provenance& p) {
  std::string out = "# mfk modulus estimate\n" + provenance_header(p);
  out += "# columns: distance = d_KR2 of the quadruple; deviation = |delta k|; envelope = fitted modulus at distance\n";
  out += "distance,deviation,envelope\n";
  for (const auto& s : e.samples)
    out += num(s.distance) + "," + num(s.deviation) + "," + num(e.envelope(s.distance)) + "\n";
  return out;
}

}  // namespace mfk::report
