#include "gsreg/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gsreg/errors.hpp"

namespace gsreg {

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw std::runtime_error("expected array for vector");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i];
  return v;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json data = Json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const int rows = j.at("rows"), cols = j.at("cols");
  const Json& data = j.at("data");
  if (static_cast<int>(data.size()) != rows * cols)
    throw std::runtime_error("matrix data length mismatch");
  Eigen::MatrixXd m(rows, cols);
  int k = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = data[k++];
  return m;
}

Json dataset_to_json(const GroupedDataset& data) {
  Json groups = Json::array();
  for (const Group& g : data.groups()) {
    Json jg{{"y", vector_to_json(g.y)}, {"x", matrix_to_json(g.x)}};
    Json meta = Json::object();
    if (g.meta.pattern) {
      Json pat = Json::array();
      for (int i = 0; i < g.meta.pattern->size(); ++i)
        pat.push_back((*g.meta.pattern)(i));
      meta["pattern"] = pat;
    }
    if (g.meta.z) meta["z"] = *g.meta.z;
    if (g.meta.random_design)
      meta["random_design"] = matrix_to_json(*g.meta.random_design);
    if (!meta.empty()) jg["meta"] = meta;
    groups.push_back(jg);
  }
  return Json{{"p", data.p()}, {"n", data.n()}, {"groups", groups}};
}

GroupedDataset dataset_from_json(const Json& j) {
  require_keys(j, {"p", "n", "groups"}, "dataset");
  const int p = j.at("p");
  std::vector<Group> groups;
  for (const Json& jg : j.at("groups")) {
    require_keys(jg, {"y", "x", "meta"}, "dataset group");
    Group g;
    g.y = vector_from_json(jg.at("y"));
    g.x = matrix_from_json(jg.at("x"));
    if (jg.contains("meta")) {
      const Json& meta = jg.at("meta");
      require_keys(meta, {"pattern", "z", "random_design"}, "group meta");
      if (meta.contains("pattern")) {
        const Json& pat = meta.at("pattern");
        Eigen::VectorXi e(pat.size());
        for (std::size_t i = 0; i < pat.size(); ++i)
          e(static_cast<int>(i)) = pat[i];
        g.meta.pattern = e;
      }
      if (meta.contains("z")) g.meta.z = meta.at("z").get<double>();
      if (meta.contains("random_design"))
        g.meta.random_design = matrix_from_json(meta.at("random_design"));
    }
    groups.push_back(std::move(g));
  }
  if (static_cast<int>(groups.size()) != j.at("n").get<int>())
    throw std::runtime_error("dataset group count does not match n");
  return GroupedDataset(std::move(groups), p);
}

void save_dataset(const std::string& path, const GroupedDataset& data) {
  write_text(path, dataset_to_json(data).dump(2) + "\n");
}

GroupedDataset load_dataset(const std::string& path) {
  return dataset_from_json(Json::parse(read_text(path)));
}

// ---------------------------------------------------------------------------
// family parameters
// ---------------------------------------------------------------------------

namespace {

std::string correlation_kind_name(CorrelationKind k) {
  switch (k) {
    case CorrelationKind::CS: return "cs";
    case CorrelationKind::AR: return "ar";
    case CorrelationKind::MA: return "ma";
  }
  return "ar";
}

CorrelationKind correlation_kind_from(const std::string& name) {
  if (name == "cs") return CorrelationKind::CS;
  if (name == "ar") return CorrelationKind::AR;
  if (name == "ma") return CorrelationKind::MA;
  throw std::runtime_error("unknown correlation kind: " + name);
}

}  // namespace

Json family_to_json(const FamilyParams& params) {
  Json j;
  if (const auto* mr = std::get_if<MissingResponseParams>(&params)) {
    j["family"] = "missing_response";
    j["sigma"] = matrix_to_json(mr->sigma);
  } else if (const auto* mem = std::get_if<MeasurementErrorParams>(&params)) {
    j["family"] = "measurement_error";
    j["alpha"] = mem->alpha;
    j["beta"] = vector_to_json(mem->beta);
    j["mu"] = vector_to_json(mem->mu);
    j["sigma2"] = mem->sigma2;
    j["sigma"] = matrix_to_json(mem->sigma);
    j["psi"] = matrix_to_json(mem->psi);
  } else if (const auto* pc = std::get_if<ParamCorrelationParams>(&params)) {
    j["family"] = "correlation";
    j["kind"] = correlation_kind_name(pc->kind);
    j["alpha"] = pc->alpha;
    j["sigma2"] = pc->sigma2;
  } else if (const auto* me = std::get_if<MixedEffectsParams>(&params)) {
    j["family"] = "mixed_effects";
    j["psi"] = matrix_to_json(me->psi);
    j["sigma2"] = me->sigma2;
  } else if (const auto* gp = std::get_if<GraphicalParams>(&params)) {
    j["family"] = "graphical";
    j["omega"] = matrix_to_json(gp->omega);
    j["truncation"] = gp->truncation;
  } else if (const auto* hs = std::get_if<HeteroSplineParams>(&params)) {
    j["family"] = "hetero_spline";
    j["beta"] = vector_to_json(hs->beta);
    j["spline_dim"] = hs->basis.dimension();
    j["spline_order"] = hs->basis.order();
  } else if (const auto* pl = std::get_if<PartialLinearParams>(&params)) {
    j["family"] = "partial_linear";
    j["beta"] = vector_to_json(pl->beta);
    j["sigma2"] = pl->sigma2;
    j["spline_dim"] = pl->basis.dimension();
    j["spline_order"] = pl->basis.order();
  }
  return j;
}

FamilyParams family_from_json(const Json& j) {
  const std::string name = j.at("family");
  if (name == "missing_response") {
    require_keys(j, {"family", "sigma"}, name);
    return MissingResponseParams{matrix_from_json(j.at("sigma"))};
  }
  if (name == "measurement_error") {
    require_keys(j, {"family", "alpha", "beta", "mu", "sigma2", "sigma", "psi"},
                 name);
    MeasurementErrorParams p;
    p.alpha = j.at("alpha");
    p.beta = vector_from_json(j.at("beta"));
    p.mu = vector_from_json(j.at("mu"));
    p.sigma2 = j.at("sigma2");
    p.sigma = matrix_from_json(j.at("sigma"));
    p.psi = matrix_from_json(j.at("psi"));
    return p;
  }
  if (name == "correlation") {
    require_keys(j, {"family", "kind", "alpha", "sigma2"}, name);
    ParamCorrelationParams p;
    p.kind = correlation_kind_from(j.at("kind"));
    p.alpha = j.at("alpha");
    p.sigma2 = j.at("sigma2");
    return p;
  }
  if (name == "mixed_effects") {
    require_keys(j, {"family", "psi", "sigma2"}, name);
    return MixedEffectsParams{matrix_from_json(j.at("psi")), j.at("sigma2")};
  }
  if (name == "graphical") {
    require_keys(j, {"family", "omega", "truncation"}, name);
    return GraphicalParams{matrix_from_json(j.at("omega")), j.at("truncation")};
  }
  if (name == "hetero_spline") {
    require_keys(j, {"family", "beta", "spline_dim", "spline_order"}, name);
    return HeteroSplineParams{
        vector_from_json(j.at("beta")),
        SplineBasis(j.at("spline_dim"), j.at("spline_order"))};
  }
  if (name == "partial_linear") {
    require_keys(j, {"family", "beta", "sigma2", "spline_dim", "spline_order"},
                 name);
    return PartialLinearParams{
        vector_from_json(j.at("beta")), j.at("sigma2"),
        SplineBasis(j.at("spline_dim"), j.at("spline_order"))};
  }
  throw std::runtime_error("unknown family: " + name);
}

Json sparse_vector_to_json(const SparseVector& v) {
  Json supp = Json::array();
  for (int s : v.support()) supp.push_back(s);
  return Json{{"dim", v.ambient_dim()},
              {"support", supp},
              {"values", vector_to_json(v.values())}};
}

SparseVector sparse_vector_from_json(const Json& j) {
  require_keys(j, {"dim", "support", "values"}, "sparse vector");
  std::vector<int> supp;
  for (const Json& s : j.at("support")) supp.push_back(s.get<int>());
  return SparseVector(std::move(supp), vector_from_json(j.at("values")),
                      j.at("dim"));
}

Json mixture_to_json(const SupportMixture& mix) {
  Json comps = Json::array();
  for (std::size_t k = 0; k < mix.supports.size(); ++k) {
    Json supp = Json::array();
    for (int s : mix.supports[k]) supp.push_back(s);
    comps.push_back(Json{{"support", supp},
                         {"log_weight", mix.log_weights[k]},
                         {"center", vector_to_json(mix.centers[k])},
                         {"cov", matrix_to_json(mix.covariances[k])}});
  }
  return Json{{"p", mix.p}, {"mode", mix.mode}, {"components", comps}};
}

SupportMixture mixture_from_json(const Json& j) {
  require_keys(j, {"p", "mode", "components"}, "mixture");
  SupportMixture mix;
  mix.p = j.at("p");
  mix.mode = j.at("mode");
  for (const Json& jc : j.at("components")) {
    require_keys(jc, {"support", "log_weight", "center", "cov"},
                 "mixture component");
    std::vector<int> supp;
    for (const Json& s : jc.at("support")) supp.push_back(s.get<int>());
    mix.supports.push_back(std::move(supp));
    mix.log_weights.push_back(jc.at("log_weight"));
    mix.centers.push_back(vector_from_json(jc.at("center")));
    mix.covariances.push_back(matrix_from_json(jc.at("cov")));
  }
  return mix;
}

void save_mixture(const std::string& path, const SupportMixture& mix) {
  write_text(path, mixture_to_json(mix).dump(2) + "\n");
}

SupportMixture load_mixture(const std::string& path) {
  return mixture_from_json(Json::parse(read_text(path)));
}

void write_chain_records(const std::string& path, const McmcChain& chain) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    const McmcState& st = chain.states[i];
    Json rec{{"iter", i},
             {"theta", sparse_vector_to_json(st.theta)},
             {"eta", family_to_json(st.eta)},
             {"log_posterior", st.log_posterior}};
    out << rec.dump() << "\n";
  }
}

std::vector<Json> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(Json::parse(line));
  }
  return out;
}

Json load_config(const std::string& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const std::exception& e) {
    // unreadable or unparsable configs are usage errors, not numerical ones
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
}

void require_keys(const Json& obj, const std::vector<std::string>& allowed,
                  const std::string& context) {
  if (!obj.is_object())
    throw std::invalid_argument(context + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw std::invalid_argument(context + ": unknown key '" + key + "'");
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gsreg
