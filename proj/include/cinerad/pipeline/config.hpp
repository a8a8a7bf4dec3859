#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace cinerad {

// Whole-pipeline parameters. Text configs use flat dotted keys
// (`sim.matrix_size = 96`); JSON configs use the same names nested
// (`{"sim": {"matrix_size": 96}}`). Lists are comma separated in text form.
struct PipelineConfig {
  // sim
  std::uint64_t seed = 1;
  std::size_t matrix_size = 128;
  std::size_t n_readout = 0;  // 0 -> matrix_size
  std::size_t n_coils = 8;
  std::size_t n_phases = 20;
  double duration_s = 12.0;
  double tr_s = 0.003;
  double noise_sigma = 1.0;
  // physio
  double rr_mean_s = 0.9;
  double rr_jitter_s = 0.05;
  double resp_period_s = 4.0;
  double resp_depth_px = -1.0;  // < 0 -> matrix-scaled default
  // preprocess
  bool phase_correct = true;
  bool gate = true;
  double gate_keep_fraction = 0.5;
  // compress
  std::string compress_method = "soc";  // soc | svd | removal | none
  std::size_t n_virtual = 6;
  double rho_signal = 0.25;
  double rho_interference = 0.375;
  // recon
  std::vector<std::string> methods = {"gridding", "igrasp", "unrolled-tv"};
  std::vector<double> accelerations = {8.0};
  std::size_t igrasp_iters = 50;
  double igrasp_lambda_rel = 0.02;
  std::size_t tv_inner = 5;
  std::size_t unrolled_stages = 6;
  std::size_t unrolled_cg = 10;
  double unrolled_lambda_rel = 0.05;
  double tv_tau_rel = 0.02;
  std::string weights_path;  // for unrolled-resnet
  // out
  std::string out_dir = "out";
  bool previews = true;
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
  }
  if (trim(v.substr(pos)) != "")
    throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
  return d;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d < 0 || d != static_cast<double>(static_cast<std::uint64_t>(d)))
    throw std::invalid_argument("config: expected a non-negative integer for " + key);
  return static_cast<std::uint64_t>(d);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config: expected a boolean for " + key + ": '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace config_detail

inline void apply_config_kv(PipelineConfig& c, const std::string& key, const std::string& value) {
  using namespace config_detail;
  const std::string v = trim(value);
  if (key == "sim.seed") c.seed = parse_uint(key, v);
  else if (key == "sim.matrix_size") c.matrix_size = parse_uint(key, v);
  else if (key == "sim.n_readout") c.n_readout = parse_uint(key, v);
  else if (key == "sim.n_coils") c.n_coils = parse_uint(key, v);
  else if (key == "sim.n_phases") c.n_phases = parse_uint(key, v);
  else if (key == "sim.duration_s") c.duration_s = parse_double(key, v);
  else if (key == "sim.tr_s") c.tr_s = parse_double(key, v);
  else if (key == "sim.noise_sigma") c.noise_sigma = parse_double(key, v);
  else if (key == "physio.rr_mean_s") c.rr_mean_s = parse_double(key, v);
  else if (key == "physio.rr_jitter_s") c.rr_jitter_s = parse_double(key, v);
  else if (key == "physio.resp_period_s") c.resp_period_s = parse_double(key, v);
  else if (key == "physio.resp_depth_px") c.resp_depth_px = parse_double(key, v);
  else if (key == "preprocess.phase_correct") c.phase_correct = parse_bool(key, v);
  else if (key == "gate.enabled") c.gate = parse_bool(key, v);
  else if (key == "gate.keep_fraction") c.gate_keep_fraction = parse_double(key, v);
  else if (key == "compress.method") c.compress_method = v;
  else if (key == "compress.n_virtual") c.n_virtual = parse_uint(key, v);
  else if (key == "compress.rho_signal") c.rho_signal = parse_double(key, v);
  else if (key == "compress.rho_interference") c.rho_interference = parse_double(key, v);
  else if (key == "recon.methods") c.methods = split_list(v);
  else if (key == "recon.accelerations") {
    c.accelerations.clear();
    for (const auto& s : split_list(v)) c.accelerations.push_back(parse_double(key, s));
  } else if (key == "recon.igrasp_iters") c.igrasp_iters = parse_uint(key, v);
  else if (key == "recon.igrasp_lambda_rel") c.igrasp_lambda_rel = parse_double(key, v);
  else if (key == "recon.tv_inner") c.tv_inner = parse_uint(key, v);
  else if (key == "recon.unrolled_stages") c.unrolled_stages = parse_uint(key, v);
  else if (key == "recon.unrolled_cg") c.unrolled_cg = parse_uint(key, v);
  else if (key == "recon.unrolled_lambda_rel") c.unrolled_lambda_rel = parse_double(key, v);
  else if (key == "recon.tv_tau_rel") c.tv_tau_rel = parse_double(key, v);
  else if (key == "recon.weights") c.weights_path = v;
  else if (key == "out.dir") c.out_dir = v;
  else if (key == "out.previews") c.previews = parse_bool(key, v);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline void check_pipeline_config(const PipelineConfig& c) {
  const auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
  if (c.matrix_size < 16 || c.matrix_size % 2 != 0)
    fail("sim.matrix_size must be even and >= 16");
  if (c.n_readout != 0 && (c.n_readout < 2 || c.n_readout % 2 != 0))
    fail("sim.n_readout must be even (or 0 for the matrix size)");
  if (c.n_coils == 0) fail("sim.n_coils must be positive");
  if (c.n_phases == 0) fail("sim.n_phases must be positive");
  if (!(c.duration_s > 0.0)) fail("sim.duration_s must be positive");
  if (!(c.tr_s > 0.0)) fail("sim.tr_s must be positive");
  if (c.noise_sigma < 0.0) fail("sim.noise_sigma must be >= 0");
  if (!(c.rr_mean_s > 0.0)) fail("physio.rr_mean_s must be positive");
  if (c.rr_jitter_s < 0.0 || c.rr_jitter_s >= c.rr_mean_s)
    fail("physio.rr_jitter_s must be in [0, rr_mean_s)");
  if (!(c.resp_period_s > 0.0)) fail("physio.resp_period_s must be positive");
  if (!(c.gate_keep_fraction > 0.0) || c.gate_keep_fraction > 1.0)
    fail("gate.keep_fraction must be in (0, 1]");
  if (c.compress_method != "soc" && c.compress_method != "svd" &&
      c.compress_method != "removal" && c.compress_method != "none")
    fail("compress.method must be one of soc, svd, removal, none");
  if (c.n_virtual == 0 || c.n_virtual > c.n_coils)
    fail("compress.n_virtual must be in [1, n_coils]");
  if (!(c.rho_signal > 0.0) || !(c.rho_signal < c.rho_interference) ||
      !(c.rho_interference <= 0.5))
    fail("need 0 < compress.rho_signal < compress.rho_interference <= 0.5");
  if (c.methods.empty()) fail("recon.methods must not be empty");
  for (const auto& m : c.methods)
    if (m != "gridding" && m != "igrasp" && m != "unrolled-tv" && m != "unrolled-resnet" &&
        m != "unrolled-identity")
      fail("unknown recon method '" + m + "'");
  if (c.accelerations.empty()) fail("recon.accelerations must not be empty");
  for (double r : c.accelerations)
    if (!(r >= 1.0)) fail("recon.accelerations entries must be >= 1");
  if (c.out_dir.empty()) fail("out.dir must not be empty");
}

namespace config_detail {

inline void collect_json(const nlohmann::json& node, const std::string& prefix,
                         PipelineConfig& c) {
  if (node.is_object()) {
    for (const auto& [k, v] : node.items())
      collect_json(v, prefix.empty() ? k : prefix + "." + k, c);
    return;
  }
  std::string text;
  if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (i > 0) text += ",";
      const auto& e = node[i];
      text += e.is_string() ? e.get<std::string>() : e.dump();
    }
  } else if (node.is_string()) {
    text = node.get<std::string>();
  } else {
    text = node.dump();
  }
  apply_config_kv(c, prefix, text);
}

}  // namespace config_detail

// Reads a config file (JSON if it starts with '{', otherwise `key = value`
// lines; '#' starts a comment) on top of the defaults.
inline PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();

  PipelineConfig c;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j = nlohmann::json::parse(text);
    config_detail::collect_json(j, "", c);
  } else {
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = config_detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                    " is not 'key = value'");
      apply_config_kv(c, config_detail::trim(line.substr(0, eq)),
                      config_detail::trim(line.substr(eq + 1)));
    }
  }
  check_pipeline_config(c);
  return c;
}

// Canonical flat text form; stable across runs, used for cache keys and the
// manifest.
inline std::string dump_pipeline_config(const PipelineConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "sim.seed = " << c.seed << "\n";
  o << "sim.matrix_size = " << c.matrix_size << "\n";
  o << "sim.n_readout = " << c.n_readout << "\n";
  o << "sim.n_coils = " << c.n_coils << "\n";
  o << "sim.n_phases = " << c.n_phases << "\n";
  o << "sim.duration_s = " << c.duration_s << "\n";
  o << "sim.tr_s = " << c.tr_s << "\n";
  o << "sim.noise_sigma = " << c.noise_sigma << "\n";
  o << "physio.rr_mean_s = " << c.rr_mean_s << "\n";
  o << "physio.rr_jitter_s = " << c.rr_jitter_s << "\n";
  o << "physio.resp_period_s = " << c.resp_period_s << "\n";
  o << "physio.resp_depth_px = " << c.resp_depth_px << "\n";
  o << "preprocess.phase_correct = " << (c.phase_correct ? "true" : "false") << "\n";
  o << "gate.enabled = " << (c.gate ? "true" : "false") << "\n";
  o << "gate.keep_fraction = " << c.gate_keep_fraction << "\n";
  o << "compress.method = " << c.compress_method << "\n";
  o << "compress.n_virtual = " << c.n_virtual << "\n";
  o << "compress.rho_signal = " << c.rho_signal << "\n";
  o << "compress.rho_interference = " << c.rho_interference << "\n";
  o << "recon.methods = ";
  for (std::size_t i = 0; i < c.methods.size(); ++i) o << (i ? "," : "") << c.methods[i];
  o << "\n";
  o << "recon.accelerations = ";
  for (std::size_t i = 0; i < c.accelerations.size(); ++i)
    o << (i ? "," : "") << c.accelerations[i];
  o << "\n";
  o << "recon.igrasp_iters = " << c.igrasp_iters << "\n";
  o << "recon.igrasp_lambda_rel = " << c.igrasp_lambda_rel << "\n";
  o << "recon.tv_inner = " << c.tv_inner << "\n";
  o << "recon.unrolled_stages = " << c.unrolled_stages << "\n";
  o << "recon.unrolled_cg = " << c.unrolled_cg << "\n";
  o << "recon.unrolled_lambda_rel = " << c.unrolled_lambda_rel << "\n";
  o << "recon.tv_tau_rel = " << c.tv_tau_rel << "\n";
  o << "recon.weights = " << c.weights_path << "\n";
  o << "out.dir = " << c.out_dir << "\n";
  o << "out.previews = " << (c.previews ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace cinerad
