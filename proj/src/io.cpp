#include "fchoq/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "field dumps are little-endian; big-endian hosts unsupported");

namespace fchoq {

namespace {

nlohmann::json point_to_json(const Point& p) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw IoError(std::string("refusing to serialize non-finite value: ") +
                  what);
}

}  // namespace

void write_field(const Field& u, const std::string& base_path,
                 const std::string& label, const nlohmann::json& meta) {
  if (!u.values.allFinite())
    throw IoError("write_field: field contains non-finite values");
  {
    std::ofstream bin(base_path + ".f64", std::ios::binary | std::ios::trunc);
    if (!bin) throw IoError("write_field: cannot open " + base_path + ".f64");
    bin.write(reinterpret_cast<const char*>(u.values.data()),
              static_cast<std::streamsize>(u.values.size() * sizeof(double)));
    if (!bin) throw IoError("write_field: short write to " + base_path + ".f64");
  }
  nlohmann::json side;
  side["schema_version"] = 1;
  side["dim"] = u.grid.dim;
  side["half_length"] = u.grid.half_length;
  side["points_per_axis"] = u.grid.n;
  side["label"] = label;
  side["meta"] = meta;
  std::ofstream js(base_path + ".json", std::ios::trunc);
  if (!js) throw IoError("write_field: cannot open " + base_path + ".json");
  js << side.dump(2) << "\n";
}

LoadedField read_field(const std::string& base_path) {
  std::ifstream js(base_path + ".json");
  if (!js) throw IoError("read_field: missing sidecar " + base_path + ".json");
  nlohmann::json side;
  try {
    js >> side;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("read_field: malformed sidecar " + base_path + ".json: " +
                  e.what());
  }
  int dim, n;
  double half_length;
  std::string label;
  try {
    dim = side.at("dim").get<int>();
    half_length = side.at("half_length").get<double>();
    n = side.at("points_per_axis").get<int>();
    label = side.value("label", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw IoError("read_field: sidecar missing required keys: " +
                  std::string(e.what()));
  }
  const GridSpec grid = make_grid(dim, half_length, n);

  std::ifstream bin(base_path + ".f64", std::ios::binary | std::ios::ate);
  if (!bin) throw IoError("read_field: missing payload " + base_path + ".f64");
  const auto bytes = static_cast<std::uint64_t>(bin.tellg());
  const std::uint64_t expect =
      static_cast<std::uint64_t>(grid.size()) * sizeof(double);
  if (bytes != expect)
    throw IoError("read_field: payload length " + std::to_string(bytes) +
                  " does not match sidecar (expected " +
                  std::to_string(expect) + ")");
  bin.seekg(0);
  Array values(grid.size());
  bin.read(reinterpret_cast<char*>(values.data()),
           static_cast<std::streamsize>(expect));
  if (!bin) throw IoError("read_field: short read from " + base_path + ".f64");
  if (!values.allFinite())
    throw IoError("read_field: payload contains non-finite values");
  LoadedField out{Field{grid, std::move(values)}, label,
                  side.value("meta", nlohmann::json::object())};
  return out;
}

nlohmann::json certificates_to_json(const Certificates& c) {
  for (double v : {c.energy.quad, c.energy.interaction, c.energy.total,
                   c.energy.rescaled_total, c.grad_norm_rel,
                   c.nehari_residual_rel, c.argmax_value, c.v_at_argmax, c.linf,
                   c.min_value, c.riesz_sup, c.sup_outside_lambda,
                   c.boundary_mass})
    require_finite(v, "certificate");
  nlohmann::json j;
  j["energy"] = {{"quad", c.energy.quad},
                 {"interaction", c.energy.interaction},
                 {"total", c.energy.total},
                 {"rescaled_total", c.energy.rescaled_total}};
  j["grad_norm_rel"] = c.grad_norm_rel;
  j["nehari_residual_rel"] = c.nehari_residual_rel;
  j["argmax"] = point_to_json(c.argmax_pt);
  j["argmax_value"] = c.argmax_value;
  j["v_at_argmax"] = c.v_at_argmax;
  j["linf"] = c.linf;
  j["min_value"] = c.min_value;
  j["riesz_sup"] = c.riesz_sup;
  j["riesz_certificate"] = c.riesz_certificate;
  j["sup_outside_lambda"] = c.sup_outside_lambda;
  j["original_certificate"] = c.original_certificate;
  j["barycenter"] = point_to_json(c.barycenter_pt);
  j["boundary_mass"] = c.boundary_mass;
  j["boundary_ok"] = c.boundary_ok;
  j["positive"] = c.positive;
  j["nontrivial"] = c.nontrivial;
  return j;
}

nlohmann::json solve_result_to_json(const SolveResult& r,
                                    const ModelConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["eps"] = cfg.eps;
  j["grid_n"] = cfg.grid.n;
  j["dim"] = cfg.grid.dim;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["seed_index"] = r.seed_index;
  j["message"] = r.message;
  j["certificates"] = certificates_to_json(r.cert);
  return j;
}

}  // namespace fchoq
