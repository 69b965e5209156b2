#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iftem/encoder.hpp"
#include "iftem/errors.hpp"
#include "iftem/kernel.hpp"
#include "iftem/model.hpp"
#include "iftem/recovery.hpp"

namespace iftem {

using json = nlohmann::json;

/// 17 significant digits: enough to round-trip an IEEE double exactly.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Pulse / signal JSON: {period, pulse:{kind,...}, amplitudes:[...],
// delays:[...]}
// ---------------------------------------------------------------------------

inline json pulse_to_json(const PulseShape& pulse) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DiracPulse>) {
          return json{{"kind", "dirac"}};
        } else if constexpr (std::is_same_v<P, BSplinePulse>) {
          return json{{"kind", "bspline"}, {"order", p.order},
                      {"scale", p.scale}};
        } else {
          json spec = json::object();
          for (const auto& [k, v] : p.spectrum)
            spec[std::to_string(k)] = json::array({v.real(), v.imag()});
          return json{{"kind", "tabulated"}, {"spectrum", spec}};
        }
      },
      pulse);
}

inline PulseShape pulse_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dirac") return DiracPulse{};
  if (kind == "bspline") {
    BSplinePulse p;
    p.order = j.at("order").get<int>();
    p.scale = j.at("scale").get<double>();
    if (p.order < 0) throw config_error("B-spline order must be >= 0");
    if (p.scale <= 0) throw config_error("B-spline scale must be > 0");
    return p;
  }
  if (kind == "tabulated") {
    TabulatedPulse p;
    for (const auto& [key, val] : j.at("spectrum").items()) {
      p.spectrum[std::stoi(key)] =
          cplx(val.at(0).get<double>(), val.at(1).get<double>());
    }
    return p;
  }
  throw config_error("unknown pulse kind: " + kind);
}

inline json signal_to_json(const FriSignal& x) {
  return json{{"period", x.period},
              {"pulse", pulse_to_json(x.pulse)},
              {"amplitudes", x.amplitudes},
              {"delays", x.delays}};
}

inline FriSignal signal_from_json(const json& j) {
  return FriSignal(pulse_from_json(j.at("pulse")),
                   j.at("amplitudes").get<std::vector<double>>(),
                   j.at("delays").get<std::vector<double>>(),
                   j.at("period").get<double>());
}

// ---------------------------------------------------------------------------
// Kernel spec: {K, include_dc, period}
// ---------------------------------------------------------------------------

inline json kernel_to_json(const KernelSpec& spec) {
  return json{{"K", spec.K},
              {"include_dc", spec.include_dc},
              {"period", spec.period}};
}

inline KernelSpec kernel_from_json(const json& j) {
  return design_kernel(j.at("K").get<int>(), j.at("include_dc").get<bool>(),
                       j.at("period").get<double>());
}

// ---------------------------------------------------------------------------
// Firing record: JSON {params, instants:[...]}; CSV columns n, t_n
// ---------------------------------------------------------------------------

inline json firing_record_to_json(const FiringRecord& rec,
                                  const TemParams& params) {
  return json{{"params",
               {{"b", params.b},
                {"kappa", params.kappa},
                {"delta", params.delta},
                {"c", params.c}}},
              {"t_start", rec.t_start},
              {"t_obs", rec.t_obs},
              {"instants", rec.instants}};
}

inline std::pair<FiringRecord, TemParams> firing_record_from_json(
    const json& j) {
  TemParams p;
  p.b = j.at("params").at("b").get<double>();
  p.kappa = j.at("params").at("kappa").get<double>();
  p.delta = j.at("params").at("delta").get<double>();
  p.c = j.at("params").at("c").get<double>();
  FiringRecord rec;
  rec.t_start = j.value("t_start", 0.0);
  rec.t_obs = j.value("t_obs", 0.0);
  rec.instants = j.at("instants").get<std::vector<double>>();
  for (size_t n = 0; n + 1 < rec.instants.size(); ++n) {
    if (!(rec.instants[n + 1] > rec.instants[n]))
      throw precondition_error("unordered firings in record");
  }
  return {rec, p};
}

inline std::string firing_record_to_csv(const FiringRecord& rec) {
  std::ostringstream os;
  os << "n,t_n\n";
  for (size_t n = 0; n < rec.instants.size(); ++n)
    os << n + 1 << "," << format_double(rec.instants[n]) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Recovered parameters:
// {method, amplitudes, delays, residual, condition_number}
// ---------------------------------------------------------------------------

inline json recovered_to_json(const RecoveredParams& p) {
  return json{{"method",
               p.method == RecoveryMethod::annihilating ? "annihilating"
                                                        : "omp"},
              {"amplitudes", p.amplitudes},
              {"delays", p.delays},
              {"residual", p.residual},
              {"condition_number", p.condition_number}};
}

// ---------------------------------------------------------------------------
// Small file helpers
// ---------------------------------------------------------------------------

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open for writing: " + path);
  out << content;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json_file(const std::string& path) {
  return json::parse(read_text_file(path));
}

/// CSV of kernel time-domain samples (columns t, g(t)).
inline std::string kernel_samples_csv(const KernelSpec& spec, int points) {
  std::ostringstream os;
  os << "t,g\n";
  for (int i = 0; i <= points; ++i) {
    const double t = -spec.period / 2.0 + i * spec.period / points;
    os << format_double(t) << "," << format_double(spec.evaluate(t)) << "\n";
  }
  return os.str();
}

}  // namespace iftem
