#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mfk/kernels.hpp"
#include "mfk/meanfield.hpp"
#include "mfk/modulus.hpp"
#include "mfk/particles.hpp"
#include "mfk/rkhs.hpp"
#include "mfk/sampler.hpp"
#include "mfk/transport.hpp"

namespace mfk::io {

using json = nlohmann::json;

// Throws ConfigInvalid naming the first key of `obj` not in `allowed`.
void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view context);

json read_json_file(const std::filesystem::path& path);  // ConfigParse / Io on failure
void write_text_file(const std::filesystem::path& path, const std::string& text);

// {"dim": d, "points": [[...], ...], "weights": [...]}; weights default to uniform.
DiscreteMeasure measure_from_json(const json& j);
json measure_to_json(const DiscreteMeasure& mu);
// One point per row, d columns, uniform weights.
DiscreteMeasure measure_from_csv(const std::string& text);
// Dispatches on extension: .csv -> CSV, otherwise JSON.
DiscreteMeasure load_measure(const std::filesystem::path& path);

json configuration_to_json(const ParticleConfiguration& x);
ParticleConfiguration configuration_from_json(const json& points);

DomainBox box_from_json(const json& j);  // {"lower": [...], "upper": [...]}
json box_to_json(const DomainBox& box);

BaseKernelSpec base_kernel_from_json(const json& j);
json base_kernel_to_json(const BaseKernelSpec& k);
// "gaussian:0.5", "imq:1"
BaseKernelSpec base_kernel_from_string(std::string_view text);

FeatureMapSpec feature_map_from_json(const json& j);
json feature_map_to_json(const FeatureMapSpec& f);

// {"family": "double_sum"|"pullback", "base": {...}, "feature_map": {...}}
DistributionKernelSpec kernel_from_json(const json& j);
json kernel_to_json(const DistributionKernelSpec& k);

// "euclidean" or "kernel:gaussian:<gamma>" / "kernel:imq:<c>"
GroundMetric metric_from_string(std::string_view text);
GroundMetric metric_from_json(const json& j);
json metric_to_json(const GroundMetric& m);

SamplerSpec sampler_from_json(const json& j);
json sampler_to_json(const SamplerSpec& s);

ObservableSpec observable_from_json(const json& j);
json observable_to_json(const ObservableSpec& o);

DynamicsSpec dynamics_from_json(const json& j);
json dynamics_to_json(const DynamicsSpec& d);

LawFamily law_family_from_json(const json& j);
json law_family_to_json(const LawFamily& f);

json modulus_to_json(const Modulus& m);

// JSON lines: a {"metadata": {...}} header, then {"points": [[...]], "label": y} per record.
// Datasets without an observable write null labels, read back as NaN.
std::string dataset_to_jsonl(const Dataset& ds);
Dataset dataset_from_jsonl(const std::string& text);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

// {"kernel", "centers", "coefficients", "lambda", "jitter", "training"}
json model_to_json(const RidgeFit& fit, const json& training);
Expansion model_from_json(const json& j);

}  // namespace mfk::io
