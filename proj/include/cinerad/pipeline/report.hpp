#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cinerad/pipeline/pipeline.hpp"

namespace cinerad {

// Reads every r*/metrics-*.json under out_dir back into metric rows, sorted
// by acceleration then method name.
inline std::vector<MethodMetrics> collect_metrics(const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::vector<MethodMetrics> rows;
  if (!fs::exists(out_dir)) throw std::runtime_error("report: no such directory " + out_dir);

  const auto as_double = [](const nlohmann::json& v) {
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s == "inf") return std::numeric_limits<double>::infinity();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
      throw std::runtime_error("report: unexpected metric value '" + s + "'");
    }
    return v.get<double>();
  };

  for (const auto& rd : fs::directory_iterator(out_dir)) {
    if (!rd.is_directory() || rd.path().filename().string().rfind("r", 0) != 0) continue;
    for (const auto& e : fs::directory_iterator(rd.path())) {
      const std::string name = e.path().filename().string();
      if (name.rfind("metrics-", 0) != 0 || e.path().extension() != ".json") continue;
      std::ifstream f(e.path());
      nlohmann::json j = nlohmann::json::parse(f);
      MethodMetrics m;
      m.method = j.at("method").get<std::string>();
      m.r = j.at("acceleration").get<double>();
      m.psnr_db = as_double(j.at("psnr_db"));
      for (const auto& v : j.at("psnr_frames_db")) m.psnr_frames.push_back(as_double(v));
      m.ssim_mean = j.at("ssim_mean").get<double>();
      m.ssim_std = j.at("ssim_std").get<double>();
      m.ssim_frames = j.at("ssim_frames").get<std::vector<double>>();
      m.sar_mean = j.at("sar_mean").get<double>();
      m.scale = cdouble(j.at("scale_re").get<double>(), j.at("scale_im").get<double>());
      m.recon_seconds = j.at("recon_seconds").get<double>();
      rows.push_back(std::move(m));
    }
  }
  std::sort(rows.begin(), rows.end(), [](const MethodMetrics& a, const MethodMetrics& b) {
    if (a.r != b.r) return a.r < b.r;
    return a.method < b.method;
  });
  return rows;
}

// Writes report.txt (aligned table) and report.csv under out_dir.
inline void write_report(const std::string& out_dir, const std::vector<MethodMetrics>& rows) {
  namespace fs = std::filesystem;
  const auto fmt_psnr = [](double v) {
    char buf[32];
    if (std::isinf(v))
      std::snprintf(buf, sizeof buf, "inf");
    else
      std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  {
    std::ofstream f(fs::path(out_dir) / "report.txt");
    if (!f) throw std::runtime_error("report: cannot write report.txt");
    char line[160];
    std::snprintf(line, sizeof line, "%-18s %6s %10s %16s %8s %10s\n", "method", "R",
                  "PSNR(dB)", "SSIM", "SAR", "time(s)");
    f << line;
    f << std::string(72, '-') << "\n";
    for (const auto& m : rows) {
      char ssim[32];
      std::snprintf(ssim, sizeof ssim, "%.4f+/-%.4f", m.ssim_mean, m.ssim_std);
      std::snprintf(line, sizeof line, "%-18s %6.3g %10s %16s %8.4f %10.2f\n", m.method.c_str(),
                    m.r, fmt_psnr(m.psnr_db).c_str(), ssim, m.sar_mean, m.recon_seconds);
      f << line;
    }
  }
  {
    std::ofstream f(fs::path(out_dir) / "report.csv");
    if (!f) throw std::runtime_error("report: cannot write report.csv");
    f << "method,acceleration,psnr_db,ssim_mean,ssim_std,sar_mean,scale_re,scale_im,"
         "recon_seconds\n";
    std::ostringstream o;
    o.precision(12);
    for (const auto& m : rows) {
      o.str("");
      o << m.method << "," << m.r << "," << fmt_psnr(m.psnr_db) << "," << m.ssim_mean << ","
        << m.ssim_std << "," << m.sar_mean << "," << m.scale.real() << "," << m.scale.imag()
        << "," << m.recon_seconds << "\n";
      f << o.str();
    }
  }
}

}  // namespace cinerad
