#include "mfk/io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "mfk/errors.hpp"

namespace mfk::io {

namespace {

[[noreturn]] void invalid(std::string_view context, const std::string& what) {
  throw Error(ErrorCode::ConfigInvalid, std::string(context) + ": " + what);
}

const json& require(const json& obj, const char* key, std::string_view context) {
  if (!obj.is_object()) invalid(context, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) invalid(context, std::string("missing key '") + key + "'");
  return *it;
}

double as_number(const json& j, std::string_view context) {
  if (!j.is_number()) invalid(context, "expected a number");
  return j.get<double>();
}

std::int64_t as_integer(const json& j, std::string_view context) {
  if (!j.is_number_integer()) invalid(context, "expected an integer");
  return j.get<std::int64_t>();
}

std::string as_string(const json& j, std::string_view context) {
  if (!j.is_string()) invalid(context, "expected a string");
  return j.get<std::string>();
}

RealVector as_vector(const json& j, std::string_view context) {
  if (!j.is_array()) invalid(context, "expected an array of numbers");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = as_number(j[i], context);
  return v;
}

// Rows of equal length; returned column-wise (row length x row count).
Eigen::MatrixXd as_columns(const json& j, std::string_view context) {
  if (!j.is_array() || j.empty()) invalid(context, "expected a nonempty array of arrays");
  const std::size_t d = j.front().is_array() ? j.front().size() : 0;
  if (d == 0) invalid(context, "rows must be nonempty arrays");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != d) invalid(context, "rows must all have the same length");
    out.col(static_cast<Eigen::Index>(i)) = as_vector(j[i], context);
  }
  return out;
}

json vector_to_json(const Eigen::Ref<const RealVector>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json columns_to_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.cols(); ++i) a.push_back(vector_to_json(m.col(i)));
  return a;
}

double parse_double(std::string_view text, std::string_view context) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) invalid(context, "cannot parse number '" + std::string(text) + "'");
  return v;
}

}  // namespace

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view context) {
  if (!obj.is_object()) invalid(context, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) invalid(context, "unknown key '" + key + "'");
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigParse, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

DiscreteMeasure measure_from_json(const json& j) {
  check_keys(j, {"dim", "points", "weights"}, "measure");
  const Eigen::MatrixXd pts = as_columns(require(j, "points", "measure"), "measure.points");
  if (j.contains("dim") && as_integer(j["dim"], "measure.dim") != pts.rows())
    invalid("measure", "'dim' does not match the point length");
  RealVector w = j.contains("weights") ? as_vector(j["weights"], "measure.weights")
                                       : RealVector::Constant(pts.cols(), 1.0 / static_cast<double>(pts.cols()));
  return DiscreteMeasure(pts, std::move(w));
}

json measure_to_json(const DiscreteMeasure& mu) {
  return {{"dim", mu.dim()}, {"points", columns_to_json(mu.atoms())}, {"weights", vector_to_json(mu.weights())}};
}

DiscreteMeasure measure_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<RealVector> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      auto field = std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      vals.push_back(parse_double(field, "measure csv"));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(Eigen::Map<RealVector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptySupport, "csv measure has no rows");
  Eigen::MatrixXd pts(rows.front().size(), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != pts.rows()) invalid("measure csv", "rows differ in column count");
    pts.col(static_cast<Eigen::Index>(i)) = rows[i];
  }
  return DiscreteMeasure(pts, RealVector::Constant(pts.cols(), 1.0 / static_cast<double>(pts.cols())));
}

DiscreteMeasure load_measure(const std::filesystem::path& path) {
  if (path.extension() == ".csv") {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return measure_from_csv(buf.str());
  }
  return measure_from_json(read_json_file(path));
}

json configuration_to_json(const ParticleConfiguration& x) { return columns_to_json(x.points()); }

ParticleConfiguration configuration_from_json(const json& points) {
  return ParticleConfiguration(as_columns(points, "points"));
}

DomainBox box_from_json(const json& j) {
  check_keys(j, {"lower", "upper"}, "box");
  return DomainBox(as_vector(require(j, "lower", "box"), "box.lower"), as_vector(require(j, "upper", "box"), "box.upper"));
}

json box_to_json(const DomainBox& box) {
  return {{"lower", vector_to_json(box.lower())}, {"upper", vector_to_json(box.upper())}};
}

BaseKernelSpec base_kernel_from_json(const json& j) {
  const auto kind = as_string(require(j, "kind", "base kernel"), "base kernel.kind");
  if (kind == "gaussian") {
    check_keys(j, {"kind", "gamma"}, "gaussian kernel");
    return BaseKernelSpec::gaussian(as_number(require(j, "gamma", "gaussian kernel"), "gamma"));
  }
  if (kind == "imq") {
    check_keys(j, {"kind", "c"}, "imq kernel");
    return BaseKernelSpec::inverse_multiquadric(as_number(require(j, "c", "imq kernel"), "c"));
  }
  if (kind == "table") {
    check_keys(j, {"kind", "grid", "values"}, "table kernel");
    const auto grid = as_columns(require(j, "grid", "table kernel"), "table.grid");
    const auto values = as_columns(require(j, "values", "table kernel"), "table.values");
    return BaseKernelSpec(TableKernel{grid, values.transpose()});
  }
  if (kind == "constant") {
    check_keys(j, {"kind", "value", "dim"}, "constant kernel");
    return BaseKernelSpec::constant(as_number(require(j, "value", "constant kernel"), "value"),
                                    as_integer(require(j, "dim", "constant kernel"), "dim"));
  }
  invalid("base kernel", "unknown kind '" + kind + "'");
}

json base_kernel_to_json(const BaseKernelSpec& k) {
  if (const auto* g = std::get_if<GaussianKernel>(&k.kind())) return {{"kind", "gaussian"}, {"gamma", g->gamma}};
  if (const auto* m = std::get_if<InverseMultiquadricKernel>(&k.kind())) return {{"kind", "imq"}, {"c", m->c}};
  const auto& t = std::get<TableKernel>(k.kind());
  return {{"kind", "table"}, {"grid", columns_to_json(t.grid)}, {"values", columns_to_json(t.values.transpose())}};
}

BaseKernelSpec base_kernel_from_string(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) invalid("base kernel", "expected '<kind>:<parameter>'");
  const auto kind = text.substr(0, colon);
  const double param = parse_double(text.substr(colon + 1), "base kernel parameter");
  if (kind == "gaussian") return BaseKernelSpec::gaussian(param);
  if (kind == "imq") return BaseKernelSpec::inverse_multiquadric(param);
  invalid("base kernel", "unknown kind '" + std::string(kind) + "'");
}

FeatureMapSpec feature_map_from_json(const json& j) {
  const auto kind = as_string(require(j, "kind", "feature map"), "feature_map.kind");
  if (kind == "mean") {
    check_keys(j, {"kind"}, "mean feature map");
    return FeatureMapSpec::mean();
  }
  if (kind == "moments") {
    check_keys(j, {"kind", "order"}, "moments feature map");
    return FeatureMapSpec::moments(static_cast<int>(as_integer(require(j, "order", "moments feature map"), "order")));
  }
  if (kind == "soft_histogram") {
    check_keys(j, {"kind", "grid", "bandwidth"}, "soft histogram feature map");
    return FeatureMapSpec(SoftHistogramFeature{as_columns(require(j, "grid", "soft histogram"), "grid"),
                                               as_number(require(j, "bandwidth", "soft histogram"), "bandwidth")});
  }
  invalid("feature map", "unknown kind '" + kind + "'");
}

json feature_map_to_json(const FeatureMapSpec& f) {
  if (std::holds_alternative<MeanFeature>(f.kind())) return {{"kind", "mean"}};
  if (const auto* m = std::get_if<MomentsFeature>(&f.kind())) return {{"kind", "moments"}, {"order", m->order}};
  const auto& h = std::get<SoftHistogramFeature>(f.kind());
  return {{"kind", "soft_histogram"}, {"grid", columns_to_json(h.grid)}, {"bandwidth", h.bandwidth}};
}

DistributionKernelSpec kernel_from_json(const json& j) {
  check_keys(j, {"family", "base", "feature_map"}, "kernel");
  const auto family = as_string(require(j, "family", "kernel"), "kernel.family");
  const auto base = base_kernel_from_json(require(j, "base", "kernel"));
  if (family == "double_sum") {
    if (j.contains("feature_map")) invalid("kernel", "double_sum takes no feature_map");
    return DistributionKernelSpec::double_sum(base);
  }
  if (family == "pullback") {
    const auto fmap = j.contains("feature_map") ? feature_map_from_json(j["feature_map"]) : FeatureMapSpec::mean();
    return DistributionKernelSpec::pullback(base, fmap);
  }
  invalid("kernel", "unknown family '" + family + "'");
}

json kernel_to_json(const DistributionKernelSpec& k) {
  if (k.is_double_sum()) return {{"family", "double_sum"}, {"base", base_kernel_to_json(k.base())}};
  const auto& p = std::get<PullbackFamily>(k.kind());
  return {{"family", "pullback"}, {"base", base_kernel_to_json(p.base)}, {"feature_map", feature_map_to_json(p.fmap)}};
}

GroundMetric metric_from_string(std::string_view text) {
  if (text == "euclidean") return GroundMetric::euclidean();
  if (text.starts_with("kernel:")) return GroundMetric::kernel(base_kernel_from_string(text.substr(7)));
  invalid("metric", "expected 'euclidean' or 'kernel:<kind>:<parameter>'");
}

GroundMetric metric_from_json(const json& j) {
  if (j.is_string()) return metric_from_string(j.get<std::string>());
  const auto kind = as_string(require(j, "kind", "metric"), "metric.kind");
  if (kind == "euclidean") {
    check_keys(j, {"kind"}, "metric");
    return GroundMetric::euclidean();
  }
  if (kind == "kernel") {
    check_keys(j, {"kind", "base"}, "metric");
    return GroundMetric::kernel(base_kernel_from_json(require(j, "base", "metric")));
  }
  if (kind == "explicit") {
    check_keys(j, {"kind", "grid", "costs"}, "metric");
    return GroundMetric(ExplicitMatrixMetric{as_columns(require(j, "grid", "metric"), "grid"),
                                             as_columns(require(j, "costs", "metric"), "costs").transpose()});
  }
  invalid("metric", "unknown kind '" + kind + "'");
}

json metric_to_json(const GroundMetric& m) {
  if (std::holds_alternative<EuclideanMetric>(m.kind())) return {{"kind", "euclidean"}};
  if (const auto* k = std::get_if<KernelMetric>(&m.kind())) return {{"kind", "kernel"}, {"base", base_kernel_to_json(k->base)}};
  const auto& e = std::get<ExplicitMatrixMetric>(m.kind());
  return {{"kind", "explicit"}, {"grid", columns_to_json(e.grid)}, {"costs", columns_to_json(e.costs.transpose())}};
}

SamplerSpec sampler_from_json(const json& j) {
  const auto kind = as_string(require(j, "kind", "sampler"), "sampler.kind");
  if (kind == "uniform") {
    check_keys(j, {"kind", "lower", "upper", "domain"}, "uniform sampler");
    DomainBox support(as_vector(require(j, "lower", "uniform sampler"), "lower"),
                      as_vector(require(j, "upper", "uniform sampler"), "upper"));
    DomainBox domain = j.contains("domain") ? box_from_json(j["domain"]) : support;
    return SamplerSpec(UniformBoxSampler{support}, domain);
  }
  if (kind == "truncated_normal") {
    check_keys(j, {"kind", "mean", "stddev", "lower", "upper", "domain"}, "truncated normal sampler");
    DomainBox support(as_vector(require(j, "lower", "truncated normal sampler"), "lower"),
                      as_vector(require(j, "upper", "truncated normal sampler"), "upper"));
    DomainBox domain = j.contains("domain") ? box_from_json(j["domain"]) : support;
    return SamplerSpec(TruncatedNormalSampler{as_vector(require(j, "mean", "truncated normal sampler"), "mean"),
                                              as_vector(require(j, "stddev", "truncated normal sampler"), "stddev"),
                                              support},
                       domain);
  }
  if (kind == "mixture") {
    check_keys(j, {"kind", "components", "weights", "domain"}, "mixture sampler");
    BoxMixtureSampler mix;
    const auto& comps = require(j, "components", "mixture sampler");
    if (!comps.is_array()) invalid("mixture sampler", "components must be an array");
    for (const auto& c : comps) mix.components.push_back(box_from_json(c));
    const RealVector w = as_vector(require(j, "weights", "mixture sampler"), "weights");
    mix.weights.assign(w.data(), w.data() + w.size());
    return SamplerSpec(mix, box_from_json(require(j, "domain", "mixture sampler")));
  }
  if (kind == "dirac") {
    check_keys(j, {"kind", "location", "domain"}, "dirac sampler");
    return SamplerSpec(DiracSampler{as_vector(require(j, "location", "dirac sampler"), "location")},
                       box_from_json(require(j, "domain", "dirac sampler")));
  }
  invalid("sampler", "unknown kind '" + kind + "'");
}

json sampler_to_json(const SamplerSpec& s) {
  json out = std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformBoxSampler>) {
          return {{"kind", "uniform"}, {"lower", vector_to_json(k.support.lower())}, {"upper", vector_to_json(k.support.upper())}};
        } else if constexpr (std::is_same_v<T, TruncatedNormalSampler>) {
          return {{"kind", "truncated_normal"}, {"mean", vector_to_json(k.mean)}, {"stddev", vector_to_json(k.stddev)},
                  {"lower", vector_to_json(k.support.lower())}, {"upper", vector_to_json(k.support.upper())}};
        } else if constexpr (std::is_same_v<T, BoxMixtureSampler>) {
          json comps = json::array();
          for (const auto& c : k.components) comps.push_back(box_to_json(c));
          return {{"kind", "mixture"}, {"components", comps}, {"weights", k.weights}};
        } else {
          return {{"kind", "dirac"}, {"location", vector_to_json(k.location)}};
        }
      },
      s.kind());
  out["domain"] = box_to_json(s.domain());
  return out;
}

ObservableSpec observable_from_json(const json& j) {
  const auto kind = as_string(require(j, "kind", "observable"), "observable.kind");
  if (kind == "coordinate_mean") {
    check_keys(j, {"kind"}, "observable");
    return ObservableSpec(CoordinateMeanObservable{});
  }
  if (kind == "variance") {
    check_keys(j, {"kind"}, "observable");
    return ObservableSpec(VarianceObservable{});
  }
  if (kind == "interaction_energy") {
    check_keys(j, {"kind", "potential"}, "observable");
    const auto& p = require(j, "potential", "observable");
    const auto pk = as_string(require(p, "kind", "potential"), "potential.kind");
    if (pk == "gaussian") {
      check_keys(p, {"kind", "gamma"}, "potential");
      return ObservableSpec(InteractionEnergyObservable{GaussianPotential{as_number(require(p, "gamma", "potential"), "gamma")}});
    }
    if (pk == "inverse_quadratic") {
      check_keys(p, {"kind", "c"}, "potential");
      return ObservableSpec(InteractionEnergyObservable{InverseQuadraticPotential{as_number(require(p, "c", "potential"), "c")}});
    }
    if (pk == "constant") {
      check_keys(p, {"kind", "value"}, "potential");
      return ObservableSpec(InteractionEnergyObservable{ConstantPotential{as_number(require(p, "value", "potential"), "value")}});
    }
    invalid("potential", "unknown kind '" + pk + "'");
  }
  invalid("observable", "unknown kind '" + kind + "'");
}

json observable_to_json(const ObservableSpec& o) {
  if (std::holds_alternative<CoordinateMeanObservable>(o.kind())) return {{"kind", "coordinate_mean"}};
  if (std::holds_alternative<VarianceObservable>(o.kind())) return {{"kind", "variance"}};
  const auto& phi = std::get<InteractionEnergyObservable>(o.kind()).potential;
  json p;
  if (const auto* g = std::get_if<GaussianPotential>(&phi)) p = {{"kind", "gaussian"}, {"gamma", g->gamma}};
  else if (const auto* q = std::get_if<InverseQuadraticPotential>(&phi)) p = {{"kind", "inverse_quadratic"}, {"c", q->c}};
  else p = {{"kind", "constant"}, {"value", std::get<ConstantPotential>(phi).value}};
  return {{"kind", "interaction_energy"}, {"potential", p}};
}

DynamicsSpec dynamics_from_json(const json& j) {
  const auto kind = as_string(require(j, "kind", "dynamics"), "dynamics.kind");
  const auto initial = sampler_from_json(require(j, "initial", "dynamics"));
  if (kind == "attraction_repulsion") {
    check_keys(j, {"kind", "initial", "attraction", "repulsion", "length", "dt", "noise"}, "dynamics");
    return DynamicsSpec(AttractionRepulsionDynamics{as_number(require(j, "attraction", "dynamics"), "attraction"),
                                                    as_number(require(j, "repulsion", "dynamics"), "repulsion"),
                                                    as_number(require(j, "length", "dynamics"), "length"),
                                                    as_number(require(j, "dt", "dynamics"), "dt"),
                                                    as_number(require(j, "noise", "dynamics"), "noise")},
                        initial);
  }
  if (kind == "diffusion") {
    check_keys(j, {"kind", "initial", "dt", "noise"}, "dynamics");
    return DynamicsSpec(PureDiffusionDynamics{as_number(require(j, "dt", "dynamics"), "dt"),
                                              as_number(require(j, "noise", "dynamics"), "noise")},
                        initial);
  }
  invalid("dynamics", "unknown kind '" + kind + "'");
}

json dynamics_to_json(const DynamicsSpec& d) {
  json out;
  if (const auto* a = std::get_if<AttractionRepulsionDynamics>(&d.kind)) {
    out = {{"kind", "attraction_repulsion"}, {"attraction", a->attraction}, {"repulsion", a->repulsion},
           {"length", a->length}, {"dt", a->dt}, {"noise", a->noise}};
  } else {
    const auto& p = std::get<PureDiffusionDynamics>(d.kind);
    out = {{"kind", "diffusion"}, {"dt", p.dt}, {"noise", p.noise}};
  }
  out["initial"] = sampler_to_json(d.initial);
  return out;
}

LawFamily law_family_from_json(const json& j) {
  check_keys(j, {"domain", "mean_range", "sd_range"}, "law family");
  const RealVector mr = as_vector(require(j, "mean_range", "law family"), "mean_range");
  const RealVector sr = as_vector(require(j, "sd_range", "law family"), "sd_range");
  if (mr.size() != 2 || sr.size() != 2 || mr[0] > mr[1] || sr[0] > sr[1] || !(sr[0] > 0.0))
    invalid("law family", "ranges must be [lo, hi] with lo <= hi and sd lo > 0");
  return LawFamily{box_from_json(require(j, "domain", "law family")), mr[0], mr[1], sr[0], sr[1]};
}

json law_family_to_json(const LawFamily& f) {
  return {{"domain", box_to_json(f.domain)}, {"mean_range", {f.mean_lo, f.mean_hi}}, {"sd_range", {f.sd_lo, f.sd_hi}}};
}

json modulus_to_json(const Modulus& m) {
  json out = {{"metric", metric_to_json(m.metric())}};
  if (m.is_linear()) {
    out["kind"] = "linear";
    out["slope"] = m.slope();
  } else {
    out["kind"] = "piecewise";
    json knots = json::array();
    for (const auto& [r, y] : m.knots()) knots.push_back({r, y});
    out["knots"] = knots;
  }
  return out;
}

std::string dataset_to_jsonl(const Dataset& ds) {
  json meta = {{"M", ds.m}, {"dim", ds.dim}, {"seed", ds.seed},
               {"observable", ds.observable.empty() ? json(nullptr) : json::parse(ds.observable)},
               {"dynamics", ds.dynamics.empty() ? json(nullptr) : json::parse(ds.dynamics)}};
  std::string out = json{{"metadata", meta}}.dump() + "\n";
  // Unlabelled trajectories carry a null label.
  for (const auto& r : ds.records)
    out += json{{"points", configuration_to_json(r.config)},
                {"label", ds.observable.empty() ? json(nullptr) : json(r.label)}}
               .dump() +
           "\n";
  return out;
}

Dataset dataset_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Dataset ds;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ConfigParse, "dataset line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!header) {
      check_keys(j, {"metadata"}, "dataset header");
      const auto& meta = require(j, "metadata", "dataset header");
      check_keys(meta, {"M", "dim", "seed", "observable", "dynamics"}, "dataset metadata");
      ds.m = as_integer(require(meta, "M", "dataset metadata"), "M");
      ds.dim = as_integer(require(meta, "dim", "dataset metadata"), "dim");
      if (meta.contains("seed")) ds.seed = meta["seed"].get<std::uint64_t>();
      if (meta.contains("observable") && !meta["observable"].is_null()) ds.observable = meta["observable"].dump();
      if (meta.contains("dynamics") && !meta["dynamics"].is_null()) ds.dynamics = meta["dynamics"].dump();
      header = true;
      continue;
    }
    check_keys(j, {"points", "label"}, "dataset record");
    auto config = configuration_from_json(require(j, "points", "dataset record"));
    const auto& lj = require(j, "label", "dataset record");
    const double label = lj.is_null() ? std::numeric_limits<double>::quiet_NaN() : as_number(lj, "label");
    if (config.size() != ds.m || config.dim() != ds.dim)
      throw Error(ErrorCode::HeterogeneousConfigs, "dataset record shape differs from metadata");
    ds.records.push_back({std::move(config), label});
  }
  if (!header) throw Error(ErrorCode::ConfigInvalid, "dataset has no metadata header");
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) { write_text_file(path, dataset_to_jsonl(ds)); }

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return dataset_from_jsonl(buf.str());
}

json model_to_json(const RidgeFit& fit, const json& training) {
  json centers = json::array();
  for (const auto& c : fit.model.centers) centers.push_back(measure_to_json(c));
  return {{"kernel", kernel_to_json(fit.model.kernel)},
          {"centers", centers},
          {"coefficients", vector_to_json(fit.model.coefficients)},
          {"lambda", fit.lambda},
          {"jitter", fit.jitter},
          {"training", training}};
}

Expansion model_from_json(const json& j) {
  check_keys(j, {"kernel", "centers", "coefficients", "lambda", "jitter", "training"}, "model");
  const auto kernel = kernel_from_json(require(j, "kernel", "model"));
  std::vector<DiscreteMeasure> centers;
  const auto& cs = require(j, "centers", "model");
  if (!cs.is_array()) invalid("model", "centers must be an array");
  for (const auto& c : cs) centers.push_back(measure_from_json(c));
  return Expansion(std::move(centers), as_vector(require(j, "coefficients", "model"), "coefficients"), kernel);
}

}  // namespace mfk::io
