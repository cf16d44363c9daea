#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mfk/meanfield.hpp"
#include "mfk/modulus.hpp"

namespace mfk::report {

using json = nlohmann::json;

enum class Format { Csv, Json };

Format parse_format(std::string_view text);  // "csv" | "json"

// FNV-1a, 64 bit, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

// Hash of the compact dump of `resolved_config`; the dump itself is embedded.
Provenance make_provenance(const json& resolved_config);

json to_json(const ConvergenceReport& r);
ConvergenceReport convergence_from_json(const json& j);
// Header comments carry provenance and scalars; data columns M,median,q25,q75.
std::string to_csv(const ConvergenceReport& r);
ConvergenceReport convergence_from_csv(const std::string& text);
// Gnuplot data file: M median q25 q75.
std::string to_dat(const ConvergenceReport& r);

json to_json(const TransferReport& r);
TransferReport transfer_from_json(const json& j);
// Data columns M,rmse,baseline_rmse,mean_field_gap (empty when unknown).
std::string to_csv(const TransferReport& r);
TransferReport transfer_from_csv(const std::string& text);

std::string serialize(const ConvergenceReport& r, Format f);
std::string serialize(const TransferReport& r, Format f);

void emit_report(const ConvergenceReport& r, const std::filesystem::path& path, Format f);
void emit_report(const TransferReport& r, const std::filesystem::path& path, Format f);
// Format is detected from content: CSV files start with '#'.
ConvergenceReport read_convergence_report(const std::filesystem::path& path);
TransferReport read_transfer_report(const std::filesystem::path& path);

json to_json(const McShaneCheckReport& r, const Provenance& p);
std::string to_csv(const McShaneCheckReport& r, const Provenance& p);  // one row per pair
json to_json(const ModulusEstimate& e, const Provenance& p);
std::string to_csv(const ModulusEstimate& e, const Provenance& p);  // one row per sample

}  // namespace mfk::report
