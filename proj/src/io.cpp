// Copyright 2026 The noisytb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "noisytb/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "noisytb/error.hpp"

#ifndef NOISYTB_VERSION
#define NOISYTB_VERSION "0.0.0"
#endif

namespace ntb {

std::string_view code_version() { return NOISYTB_VERSION; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? s.npos : p - start)));
    if (p == std::string_view::npos) return out;
    start = p + 1;
  }
}

std::size_t parse_size(std::string_view s, std::string_view what) {
  const double v = parse_double(s, what);
  if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15)
    throw ConfigError(std::string(what) + " must be a non-negative integer (got '" +
                      std::string(s) + "')");
  return static_cast<std::size_t>(v);
}

std::int64_t parse_int(std::string_view s, std::string_view what) {
  const double v = parse_double(s, what);
  if (v != std::floor(v) || std::abs(v) > 9.0e15)
    throw ConfigError(std::string(what) + " must be an integer (got '" + std::string(s) + "')");
  return static_cast<std::int64_t>(v);
}

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw ConfigError(std::string(what) + " must be an unsigned 64-bit integer (got '" +
                      std::string(s) + "')");
  return v;
}

bool parse_bool(std::string_view s, std::string_view what) {
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ConfigError(std::string(what) + " must be true or false (got '" + std::string(s) + "')");
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

std::string kind_name(const UnravellingKind& k) {
  std::string s(to_string(k.tag));
  if (k.tag == Unravelling::qsd || k.tag == Unravelling::qsd_wide_open)
    s += ":" + std::string(to_string(k.noise));
  return s;
}

UnravellingKind parse_kind_name(std::string_view s) {
  const auto colon = s.find(':');
  UnravellingKind k;
  k.tag = parse_unravelling(trim(s.substr(0, colon)));
  if (colon != std::string_view::npos) k.noise = parse_qsd_noise(trim(s.substr(colon + 1)));
  return k;
}

struct Setting {
  std::string section;
  std::string key;
  std::function<void(Config&, std::string_view)> set;
  std::function<std::string(const Config&)> get;
};

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = [] {
    std::vector<Setting> t;
    auto add = [&](std::string sec, std::string key, auto set, auto get) {
      t.push_back({std::move(sec), std::move(key), set, get});
    };
    add("model", "gamma",
        [](Config& c, std::string_view v) { c.model.gamma = parse_double(v, "model.gamma"); },
        [](const Config& c) { return format_double(c.model.gamma); });
    add("model", "dt", [](Config& c, std::string_view v) { c.model.dt = parse_double(v, "model.dt"); },
        [](const Config& c) { return format_double(c.model.dt); });
    add("model", "sites",
        [](Config& c, std::string_view v) { c.model.n_sites = parse_size(v, "model.sites"); },
        [](const Config& c) { return std::to_string(c.model.n_sites); });
    add("model", "boundary",
        [](Config& c, std::string_view v) { c.model.boundary = parse_boundary(v); },
        [](const Config& c) { return std::string(to_string(c.model.boundary)); });
    add("model", "seed",
        [](Config& c, std::string_view v) { c.model.seed = parse_u64(v, "model.seed"); },
        [](const Config& c) { return std::to_string(c.model.seed); });
    add("model", "t_max",
        [](Config& c, std::string_view v) { c.model.t_max = parse_double(v, "model.t_max"); },
        [](const Config& c) { return format_double(c.model.t_max); });

    add("initial", "kind",
        [](Config& c, std::string_view v) { c.initial.kind = parse_initial_kind(v); },
        [](const Config& c) { return std::string(to_string(c.initial.kind)); });
    add("initial", "variance",
        [](Config& c, std::string_view v) {
          c.initial.variance = parse_double(v, "initial.variance");
        },
        [](const Config& c) { return format_double(c.initial.variance); });
    add("initial", "center",
        [](Config& c, std::string_view v) { c.initial.center = parse_int(v, "initial.center"); },
        [](const Config& c) { return std::to_string(c.initial.center); });

    add("run", "unravelling",
        [](Config& c, std::string_view v) { c.unravelling.tag = parse_unravelling(v); },
        [](const Config& c) { return std::string(to_string(c.unravelling.tag)); });
    add("run", "noise",
        [](Config& c, std::string_view v) { c.unravelling.noise = parse_qsd_noise(v); },
        [](const Config& c) { return std::string(to_string(c.unravelling.noise)); });
    add("run", "trajectories",
        [](Config& c, std::string_view v) {
          c.trajectories = parse_size(v, "run.trajectories");
        },
        [](const Config& c) { return std::to_string(c.trajectories); });
    add("run", "workers",
        [](Config& c, std::string_view v) { c.workers = parse_size(v, "run.workers"); },
        [](const Config& c) { return std::to_string(c.workers); });
    add("run", "output", [](Config& c, std::string_view v) { c.output = std::string(v); },
        [](const Config& c) { return c.output; });
    add("run", "persist_trajectories",
        [](Config& c, std::string_view v) {
          c.persist_trajectories = parse_bool(v, "run.persist_trajectories");
        },
        [](const Config& c) { return std::string(c.persist_trajectories ? "true" : "false"); });
    add("run", "memory_budget_mb",
        [](Config& c, std::string_view v) {
          c.memory_budget_mb = parse_size(v, "run.memory_budget_mb");
        },
        [](const Config& c) { return std::to_string(c.memory_budget_mb); });

    add("grid", "kind", [](Config& c, std::string_view v) { c.grid.kind = parse_grid_kind(v); },
        [](const Config& c) { return std::string(to_string(c.grid.kind)); });
    add("grid", "t_min",
        [](Config& c, std::string_view v) { c.grid.t_min = parse_double(v, "grid.t_min"); },
        [](const Config& c) { return format_double(c.grid.t_min); });
    add("grid", "per_decade",
        [](Config& c, std::string_view v) {
          c.grid.per_decade = parse_size(v, "grid.per_decade");
        },
        [](const Config& c) { return std::to_string(c.grid.per_decade); });
    add("grid", "count",
        [](Config& c, std::string_view v) { c.grid.count = parse_size(v, "grid.count"); },
        [](const Config& c) { return std::to_string(c.grid.count); });

    add("compare", "checkpoints",
        [](Config& c, std::string_view v) {
          c.checkpoints.clear();
          for (auto p : split(v, ','))
            c.checkpoints.push_back(parse_double(p, "compare.checkpoints"));
        },
        [](const Config& c) { return join_doubles(c.checkpoints); });
    add("compare", "unravellings",
        [](Config& c, std::string_view v) {
          c.compare_kinds.clear();
          for (auto p : split(v, ',')) c.compare_kinds.push_back(parse_kind_name(p));
        },
        [](const Config& c) {
          std::string s;
          for (std::size_t i = 0; i < c.compare_kinds.size(); ++i)
            s += (i ? "," : "") + kind_name(c.compare_kinds[i]);
          return s;
        });
    add("compare", "oracle_gamma",
        [](Config& c, std::string_view v) {
          if (v.empty() || v == "none") {
            c.oracle_gamma.reset();
          } else {
            c.oracle_gamma = parse_double(v, "compare.oracle_gamma");
          }
        },
        [](const Config& c) {
          return c.oracle_gamma ? format_double(*c.oracle_gamma) : std::string("none");
        });
    add("compare", "abs_tolerance",
        [](Config& c, std::string_view v) {
          c.abs_tolerance = parse_double(v, "compare.abs_tolerance");
        },
        [](const Config& c) { return format_double(c.abs_tolerance); });
    add("compare", "z_limit",
        [](Config& c, std::string_view v) { c.z_limit = parse_double(v, "compare.z_limit"); },
        [](const Config& c) { return format_double(c.z_limit); });

    add("lindblad", "dt",
        [](Config& c, std::string_view v) { c.lindblad_dt = parse_double(v, "lindblad.dt"); },
        [](const Config& c) { return format_double(c.lindblad_dt); });
    add("lindblad", "samples",
        [](Config& c, std::string_view v) {
          c.lindblad_samples = parse_size(v, "lindblad.samples");
        },
        [](const Config& c) { return std::to_string(c.lindblad_samples); });
    return t;
  }();
  return table;
}

const Setting* find_setting(std::string_view section, std::string_view key) {
  for (const auto& s : settings())
    if (s.section == section && s.key == key) return &s;
  return nullptr;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

double parse_double(std::string_view s, std::string_view what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw ConfigError(std::string(what) + " is not a number: '" + std::string(s) + "'");
  return v;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& s : settings()) out.push_back(s.section + "." + s.key);
  return out;
}

std::optional<std::string> suggest(std::string_view word,
                                   const std::vector<std::string>& candidates) {
  std::optional<std::string> best;
  std::size_t best_d = 3;
  for (const auto& c : candidates) {
    const std::size_t d = edit_distance(word, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

void apply_setting(Config& cfg, std::string_view key, std::string_view value) {
  const auto dot = key.find('.');
  if (dot == std::string_view::npos) {
    const Setting* match = nullptr;
    for (const auto& s : settings()) {
      if (s.key != key) continue;
      if (match != nullptr)
        throw ConfigError("key '" + std::string(key) + "' is ambiguous; use section.key");
      match = &s;
    }
    if (match == nullptr) {
      std::vector<std::string> names;
      for (const auto& s : settings()) names.push_back(s.key);
      auto hint = suggest(key, names);
      throw ConfigError("unknown key '" + std::string(key) + "'" +
                        (hint ? "; did you mean '" + *hint + "'?" : std::string()));
    }
    match->set(cfg, trim(value));
    return;
  }
  const Setting* s = find_setting(key.substr(0, dot), key.substr(dot + 1));
  if (s == nullptr) {
    auto hint = suggest(key, config_keys());
    throw ConfigError("unknown key '" + std::string(key) + "'" +
                      (hint ? "; did you mean '" + *hint + "'?" : std::string()));
  }
  s->set(cfg, trim(value));
}

Config parse_config(std::string_view text, Config base, std::string_view source) {
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  const std::vector<std::string> sections{"model", "initial", "run", "grid", "compare",
                                          "lindblad"};
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos)
      line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
        auto hint = suggest(section, sections);
        throw ConfigError(where + "unknown section [" + section + "]" +
                          (hint ? "; did you mean [" + *hint + "]?" : std::string()));
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError(where + "key '" + std::string(key) + "' appears before any [section]");
    const Setting* s = find_setting(section, key);
    if (s == nullptr) {
      std::vector<std::string> names;
      for (const auto& st : settings())
        if (st.section == section) names.push_back(st.key);
      auto hint = suggest(key, names);
      throw ConfigError(where + "unknown key '" + std::string(key) + "' in [" + section + "]" +
                        (hint ? "; did you mean '" + *hint + "'?" : std::string()));
    }
    try {
      s->set(base, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return base;
}

Config load_config(const std::string& path, Config base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base), path);
}

RunSpec to_run_spec(const Config& cfg) {
  RunSpec r;
  r.params = cfg.model;
  r.unravelling = cfg.unravelling;
  r.initial = cfg.initial;
  r.n_trajectories = cfg.trajectories;
  r.grid = cfg.grid;
  r.output_path = cfg.output;
  r.persist_trajectories = cfg.persist_trajectories;
  r.workers = cfg.workers;
  r.memory_budget_bytes = cfg.memory_budget_mb << 20;
  r.validate();
  return r;
}

CompareSpec to_compare_spec(const Config& cfg) {
  CompareSpec c;
  c.params = cfg.model;
  c.params.t_max = cfg.checkpoints.empty() ? cfg.model.t_max : cfg.checkpoints.back();
  c.initial = cfg.initial;
  c.checkpoints = cfg.checkpoints;
  c.n_trajectories = cfg.trajectories;
  c.kinds = cfg.compare_kinds;
  c.oracle_gamma = cfg.oracle_gamma;
  c.lindblad_dt = cfg.lindblad_dt;
  c.abs_tolerance = cfg.abs_tolerance;
  c.z_limit = cfg.z_limit;
  c.workers = cfg.workers;
  c.validate();
  return c;
}

namespace {

Config figure_config(Unravelling u, double gamma, double variance, std::size_t trajectories,
                     double t_max) {
  Config c;
  c.model.gamma = gamma;
  c.model.dt = 1e-4;
  c.model.n_sites = 1000;
  c.model.boundary = Boundary::open;
  c.model.t_max = t_max;
  c.initial = {InitialKind::gaussian_packet, variance, 0};
  c.unravelling = {u, QsdNoise::complex};
  c.trajectories = trajectories;
  return c;
}

std::string fmt_gamma(double g) { return format_double(g); }

}  // namespace

Config compare_defaults() {
  Config c;
  c.model.gamma = 4.0;
  c.model.dt = 1e-4;
  c.model.n_sites = 11;
  c.model.boundary = Boundary::periodic;
  c.model.t_max = 2.0;
  c.initial = {InitialKind::gaussian_packet, 1.0, 0};
  c.trajectories = 5000;
  return c;
}

Config lindblad_defaults() {
  Config c;
  c.model.gamma = 40.0;
  c.model.n_sites = 41;
  c.model.boundary = Boundary::periodic;
  c.model.t_max = 5.0;
  c.initial = {InitialKind::gaussian_packet, 1.0, 0};
  return c;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    std::vector<Preset> p;
    for (double g : {5.0, 10.0, 20.0}) {
      p.push_back({"fig1-gamma" + fmt_gamma(g),
                   "mean squared position, white-noise potential, gamma = " + fmt_gamma(g) +
                       ", sigma^2 = 4, 1e4 trajectories",
                   figure_config(Unravelling::wnp, g, 4.0, 10000, 100.0 / g)});
      p.push_back({"fig1-qsd-gamma" + fmt_gamma(g),
                   "mean squared position, state diffusion, gamma = " + fmt_gamma(g) +
                       ", sigma^2 = 4, 1e4 trajectories",
                   figure_config(Unravelling::qsd, g, 4.0, 10000, 100.0 / g)});
    }
    {
      Config c = figure_config(Unravelling::wnp, 10.0, 4.0, 4000, 100.0);
      c.grid.t_min = 0.01;
      c.grid.per_decade = 20;
      p.push_back({"fig2",
                   "squared centre of mass, white-noise potential, gamma = 10, sigma^2 = 4, "
                   "4e3 trajectories",
                   c});
    }
    for (double g : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
      const std::size_t n = g <= 4.0 ? 5000 : 10000;
      Config c = figure_config(Unravelling::qsd, g, 25.0, n, 100.0 / g);
      c.grid.t_min = 0.01 / g;
      p.push_back({"fig3-gamma" + fmt_gamma(g),
                   "quantum variance, state diffusion, gamma = " + fmt_gamma(g) +
                       ", sigma^2 = 25, " + std::to_string(n) + " trajectories",
                   c});
    }
    {
      Config c = figure_config(Unravelling::qsd_wide_open, 1.0, 25.0, 1000, 100.0);
      c.grid.t_min = 0.01;
      p.push_back({"fig5",
                   "wide-open state diffusion (no kinetic term), sigma^2 = 25, 1e3 "
                   "trajectories, time in units of 1/gamma",
                   c});
    }
    p.push_back({"compare-default",
                 "unravelling equivalence check: N = 11 periodic, gamma = 4, t = 0.5, 1, 2",
                 compare_defaults()});
    p.push_back({"lindblad-default", "direct master equation: N = 41 periodic, gamma = 40",
                 lindblad_defaults()});
    return p;
  }();
  return all;
}

const Preset& find_preset(std::string_view name) {
  std::vector<std::string> names;
  for (const auto& p : presets()) {
    if (p.name == name) return p;
    names.push_back(p.name);
  }
  auto hint = suggest(name, names);
  throw ConfigError("unknown preset '" + std::string(name) + "'" +
                    (hint ? "; did you mean '" + *hint + "'?" : std::string()));
}

std::vector<std::pair<std::string, std::string>> spec_echo(const Config& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& s : settings()) out.emplace_back(s.section + "." + s.key, s.get(cfg));
  return out;
}

namespace {

void write_preamble(std::ostream& os, std::string_view kind, const Config& cfg) {
  os << "# noisytb " << kind << "\n";
  os << "# schema_version = " << kCsvSchemaVersion << "\n";
  os << "# code_version = " << code_version() << "\n";
  for (const auto& [k, v] : spec_echo(cfg))
    if (k != "run.output" && k != "run.workers") os << "# " << k << " = " << v << "\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

}  // namespace

void write_summary_csv(std::ostream& os, const EnsembleSummary& s, const Config& cfg) {
  write_preamble(os, "summary", cfg);
  os << "# summary.n_trajectories = " << s.n_trajectories << "\n";
  os << kSummaryHeader << "\n";
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    os << format_double(s.t[i]) << ',' << format_double(s.mean_x2[i]) << ','
       << format_double(s.mean_x_sq[i]) << ',' << format_double(s.mean_var[i]) << ','
       << format_double(s.mean_pn[i]) << ',' << format_double(s.stderr_x2[i]) << ','
       << format_double(s.stderr_x_sq[i]) << ',' << format_double(s.stderr_var[i]) << ','
       << format_double(s.stderr_pn[i]) << '\n';
  }
}

void write_summary_csv(const std::string& path, const EnsembleSummary& s, const Config& cfg) {
  auto out = open_out(path);
  write_summary_csv(out, s, cfg);
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

SummaryFile read_summary_csv(std::istream& is, std::string_view source) {
  SummaryFile f;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": " + msg);
  };
  std::vector<std::vector<double>*> cols{
      &f.summary.t,         &f.summary.mean_x2,   &f.summary.mean_x_sq,
      &f.summary.mean_var,  &f.summary.mean_pn,   &f.summary.stderr_x2,
      &f.summary.stderr_x_sq, &f.summary.stderr_var, &f.summary.stderr_pn};
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view body = trim(std::string_view(line).substr(1));
      if (body.substr(0, 4) == "fit ") {
        f.fits.emplace_back(body);
        continue;
      }
      const auto eq = body.find(" = ");
      if (eq != std::string_view::npos)
        f.meta[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 3)));
      continue;
    }
    if (!header_seen) {
      if (line != kSummaryHeader) fail("unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != cols.size())
      fail("expected " + std::to_string(cols.size()) + " columns, found " +
           std::to_string(fields.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
      cols[c]->push_back(parse_double(fields[c], "field"));
  }
  if (!header_seen) fail("missing header row");
  if (auto it = f.meta.find("schema_version"); it == f.meta.end()) {
    fail("missing schema_version in preamble");
  } else if (it->second != std::to_string(kCsvSchemaVersion)) {
    fail("unsupported schema_version " + it->second);
  }
  if (f.summary.t.empty()) fail("no data rows");
  if (auto it = f.meta.find("model.gamma"); it != f.meta.end())
    f.summary.gamma = parse_double(it->second, "model.gamma");
  if (auto it = f.meta.find("summary.n_trajectories"); it != f.meta.end())
    f.summary.n_trajectories = parse_size(it->second, "summary.n_trajectories");
  return f;
}

SummaryFile read_summary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  return read_summary_csv(in, path);
}

void append_fit_line(const std::string& path, const std::string& line) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw ConfigError("cannot append to '" + path + "'");
  out << "# fit " << line << "\n";
}

void write_compare_csv(std::ostream& os, const CompareReport& r, const Config& cfg) {
  write_preamble(os, "compare", cfg);
  os << "# compare.n_tests = " << r.n_tests << "\n";
  os << kCompareHeader << "\n";
  for (const auto& e : r.elements) {
    os << to_string(e.unravelling) << ',' << format_double(e.t) << ',' << e.row << ','
       << e.col << ',' << (e.part == 0 ? "re" : "im") << ',' << format_double(e.mean) << ','
       << format_double(e.oracle) << ',' << format_double(e.stderr_mean) << ','
       << format_double(e.z) << ',' << format_double(e.z_corrected) << '\n';
  }
  os << "# result = " << (r.pass ? "PASS" : "FAIL")
     << " max_abs_z = " << format_double(r.max_abs_z)
     << " max_corrected_z = " << format_double(r.max_corrected_z) << "\n";
}

void write_compare_csv(const std::string& path, const CompareReport& r, const Config& cfg) {
  auto out = open_out(path);
  write_compare_csv(out, r, cfg);
}

void write_lindblad_csv(std::ostream& os, const std::vector<LindbladObservation>& rows,
                        const Config& cfg) {
  write_preamble(os, "lindblad", cfg);
  os << kLindbladHeader << "\n";
  for (const auto& o : rows)
    os << format_double(o.t) << ',' << format_double(o.trace) << ','
       << format_double(o.mean_x) << ',' << format_double(o.mean_x2) << ','
       << format_double(o.purity) << ',' << format_double(o.coherence) << '\n';
}

void write_lindblad_csv(const std::string& path, const std::vector<LindbladObservation>& rows,
                        const Config& cfg) {
  auto out = open_out(path);
  write_lindblad_csv(out, rows, cfg);
}

}  // namespace ntb
