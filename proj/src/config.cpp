#include "rkdg/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace rkdg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

std::vector<std::string> split_dots(const std::string& key) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = key.find('.', start);
    parts.push_back(key.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& value) {
  int out = 0;
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ConfigError(key + ": expected an integer, got '" + value + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "on" || value == "1") return true;
  if (value == "false" || value == "no" || value == "off" || value == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& value, std::size_t count) {
  const auto words = split_words(value);
  if (words.size() != count) {
    throw ConfigError(key + ": expected " + std::to_string(count) + " numbers, got '" + value + "'");
  }
  std::vector<double> out;
  for (const auto& w : words) out.push_back(to_double(key, w));
  return out;
}

Side to_side(const std::string& key, const std::string& word) {
  if (word == "left") return Side::Left;
  if (word == "bottom") return Side::Bottom;
  if (word == "right") return Side::Right;
  if (word == "top") return Side::Top;
  throw ConfigError(key + ": unknown side '" + word + "' (left, bottom, right, top)");
}

RectangleMeshSpec& rectangle(SimConfig& c) {
  if (!c.rectangle) c.rectangle = RectangleMeshSpec{};
  return *c.rectangle;
}

void set_boundary_value(SimConfig& c, const std::string& key, int tag, const std::string& field,
                        const std::string& value) {
  auto& bc = c.boundaries[tag];
  if (field == "type") {
    if (value == "inlet") bc.kind = BoundaryKind::Inlet;
    else if (value == "reflecting") bc.kind = BoundaryKind::Reflecting;
    else if (value == "absorbing") bc.kind = BoundaryKind::Absorbing;
    else if (value == "resistive") bc.kind = BoundaryKind::Resistive;
    else throw ConfigError(key + ": unknown boundary type '" + value + "' (inlet, reflecting, absorbing, resistive)");
  } else if (field == "amplitude") {
    bc.inlet.amplitude = to_double(key, value);
  } else if (field == "frequency") {
    bc.inlet.frequency = to_double(key, value);
  } else if (field == "cycles") {
    bc.inlet.cycles = to_double(key, value);
  } else if (field == "support") {
    const auto words = split_words(value);
    if (words.size() != 3 || (words[0] != "x" && words[0] != "y")) {
      throw ConfigError(key + ": expected '<x|y> <min> <max>'");
    }
    bc.inlet.support_axis = words[0] == "x" ? 0 : 1;
    bc.inlet.support_min = to_double(key, words[1]);
    bc.inlet.support_max = to_double(key, words[2]);
  } else if (field == "alpha") {
    bc.absorbing.alpha = to_double(key, value);
  } else if (field == "filter") {
    bc.absorbing.filter = to_bool(key, value);
  } else if (field == "filter_update") {
    if (value != "step" && value != "stage") throw ConfigError(key + ": expected step or stage");
    bc.absorbing.per_stage = value == "stage";
  } else if (field == "rho_w") {
    bc.resistive.rho_w = to_double(key, value);
  } else if (field == "c_w") {
    bc.resistive.c_w = to_double(key, value);
  } else if (field == "theta") {
    bc.resistive.theta = to_double(key, value);
  } else if (field == "theta_deg") {
    bc.resistive.theta = to_double(key, value) * std::numbers::pi / 180.0;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace

void set_config_value(SimConfig& c, const std::string& key, const std::string& value) {
  const auto parts = split_dots(key);
  const auto& s = parts[0];
  const auto bad = [&key]() -> ConfigError { return ConfigError("unknown key '" + key + "'"); };

  if (parts.size() == 1) {
    if (s == "version") {
      if (to_int(key, value) != kConfigVersion) {
        throw ConfigError("unsupported config version " + value + " (expected " + std::to_string(kConfigVersion) + ")");
      }
    } else {
      throw bad();
    }
  } else if (s == "mesh" && parts.size() == 3 && parts[1] == "patch") {
    const int tag = to_int(key, parts[2]);
    const auto words = split_words(value);
    if (words.empty() || words.size() % 3 != 0) throw ConfigError(key + ": expected '<side> <from> <to>' triples");
    auto& spec = rectangle(c);
    std::erase_if(spec.patches, [tag](const BoundaryPatch& b) { return b.tag == tag; });
    for (std::size_t k = 0; k < words.size(); k += 3) {
      spec.patches.push_back({to_side(key, words[k]), to_double(key, words[k + 1]), to_double(key, words[k + 2]), tag});
    }
  } else if (s == "mesh" && parts.size() == 2) {
    const auto& f = parts[1];
    if (f == "path") c.mesh_path = value;
    else if (f == "generator") {
      if (value != "rectangle") throw ConfigError(key + ": only the 'rectangle' generator exists");
      rectangle(c);
    } else if (f == "width") rectangle(c).width = to_double(key, value);
    else if (f == "height") rectangle(c).height = to_double(key, value);
    else if (f == "nx") rectangle(c).nx = to_int(key, value);
    else if (f == "ny") rectangle(c).ny = to_int(key, value);
    else if (f == "h") c.mesh_h = to_double(key, value);
    else if (f == "jitter") rectangle(c).jitter = to_double(key, value);
    else if (f == "seed") rectangle(c).seed = static_cast<unsigned>(to_int(key, value));
    else throw bad();
  } else if (s == "space" && parts.size() == 2) {
    const auto& f = parts[1];
    if (f == "order") c.order = to_int(key, value);
    else if (f == "edge_points") c.edge_points = to_int(key, value);
    else if (f == "volume_order") c.volume_order = to_int(key, value);
    else throw bad();
  } else if (s == "time" && parts.size() == 2) {
    const auto& f = parts[1];
    if (f == "final") c.final_time = to_double(key, value);
    else if (f == "steps") c.steps = to_int(key, value);
    else if (f == "cfl") c.k_cfl = to_double(key, value);
    else if (f == "safety") c.safety = to_double(key, value);
    else if (f == "cfl_length") {
      if (value == "inradius") c.cfl_length = CflLength::Inradius;
      else if (value == "nominal") c.cfl_length = CflLength::Nominal;
      else if (value == "min_altitude") c.cfl_length = CflLength::MinAltitude;
      else if (value == "circumdiameter") c.cfl_length = CflLength::Circumdiameter;
      else throw ConfigError(key + ": expected inradius, nominal, min_altitude or circumdiameter");
    } else throw bad();
  } else if (s == "physics" && parts.size() == 2) {
    if (parts[1] == "sound_speed") c.sound_speed = to_double(key, value);
    else if (parts[1] == "density") c.rho_bar = to_double(key, value);
    else throw bad();
  } else if (s == "background" && parts.size() == 2) {
    const auto& f = parts[1];
    if (f == "type") {
      if (value == "rest") c.background.kind = BackgroundKind::Rest;
      else if (value == "poiseuille") c.background.kind = BackgroundKind::Poiseuille;
      else if (value == "gridded") c.background.kind = BackgroundKind::Gridded;
      else throw ConfigError(key + ": expected rest, poiseuille or gridded");
    } else if (f == "u_max") c.background.u_max = to_double(key, value);
    else if (f == "radius") c.background.radius = to_double(key, value);
    else if (f == "viscosity") c.background.viscosity = to_double(key, value);
    else if (f == "file") c.background.file = value;
    else throw bad();
  } else if (s == "flux" && parts.size() == 2) {
    if (parts[1] == "lambda") {
      if (value == "auto") c.lambda_override.reset();
      else c.lambda_override = to_double(key, value);
    } else if (parts[1] == "local_lambda") {
      c.local_lambda = to_bool(key, value);
    } else throw bad();
  } else if (s == "boundary" && parts.size() == 3) {
    set_boundary_value(c, key, to_int(key, parts[1]), parts[2], value);
  } else if (s == "probe" && parts.size() == 2) {
    const auto xy = to_doubles(key, value, 2);
    Probe probe{parts[1], Eigen::Vector2d(xy[0], xy[1])};
    auto it = std::find_if(c.probes.begin(), c.probes.end(), [&](const Probe& p) { return p.name == parts[1]; });
    if (it != c.probes.end()) *it = probe;
    else c.probes.push_back(probe);
  } else if (s == "initial" && parts.size() == 2) {
    const auto& f = parts[1];
    if (f == "type") {
      if (value == "zero") c.initial.kind = InitialKind::Zero;
      else if (value == "gaussian") c.initial.kind = InitialKind::Gaussian;
      else throw ConfigError(key + ": expected zero or gaussian");
    } else if (f == "center") {
      const auto xy = to_doubles(key, value, 2);
      c.initial.center = {xy[0], xy[1]};
    } else if (f == "width") c.initial.width = to_double(key, value);
    else if (f == "amplitude") c.initial.amplitude = to_double(key, value);
    else throw bad();
  } else if (s == "output" && parts.size() == 2) {
    const auto& f = parts[1];
    if (f == "dir") c.output.dir = value;
    else if (f == "vtk_every") c.output.vtk_every = to_int(key, value);
    else if (f == "final_vtk") c.output.final_vtk = to_bool(key, value);
    else if (f == "subdivision") c.output.subdivision = to_int(key, value);
    else if (f == "progress_every") c.output.progress_every = to_int(key, value);
    else if (f == "norm_every") c.output.norm_every = to_int(key, value);
    else if (f == "dump_operator") c.output.dump_operator = to_bool(key, value);
    else throw bad();
  } else if (s == "analysis" && parts.size() == 2 && parts[1] == "exact") {
    if (value == "plane_wave") c.exact_error = true;
    else if (value == "none") c.exact_error = false;
    else throw ConfigError(key + ": expected plane_wave or none");
  } else if (s == "transit" && parts.size() == 2) {
    const auto& f = parts[1];
    if (f == "receiver") c.transit.receiver = value;
    else if (f == "path") {
      const auto v = to_doubles(key, value, 4);
      c.transit.path_start = {v[0], v[1]};
      c.transit.path_end = {v[2], v[3]};
      c.transit.has_path = true;
    } else if (f == "dx") c.transit.dx = to_double(key, value);
    else if (f == "window") {
      const auto v = to_doubles(key, value, 2);
      c.transit.window_start = v[0];
      c.transit.window_end = v[1];
    } else throw bad();
  } else {
    throw bad();
  }
  c.entries[key] = value;
}

SimConfig parse_config(std::istream& in, const std::filesystem::path& base_dir, const std::string& source_name) {
  SimConfig c;
  c.source = source_name;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": empty key or value");
    }
    try {
      set_config_value(c, key, value);
    } catch (const ConfigError& err) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": " + err.what());
    }
  }
  const auto resolve = [&base_dir](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative()) p = base_dir / p;
  };
  resolve(c.mesh_path);
  resolve(c.background.file);
  resolve(c.output.dir);
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path.string());
  auto config = parse_config(in, path.parent_path(), path.string());
  config.source = path;
  return config;
}

void validate_config(const SimConfig& c) {
  if (c.mesh_path.empty() == !c.rectangle.has_value()) {
    throw ConfigError("give exactly one of mesh.path or the rectangle generator keys");
  }
  if (c.rectangle) {
    const auto spec = resolved_rectangle(c);
    if (!(spec.width > 0) || !(spec.height > 0) || spec.nx < 1 || spec.ny < 1) {
      throw ConfigError("rectangle mesh needs positive width, height and cell counts");
    }
    if (spec.jitter < 0 || spec.jitter >= 1) throw ConfigError("mesh.jitter must lie in [0, 1)");
  }
  if (c.mesh_h && !c.rectangle) throw ConfigError("mesh.h only applies to the rectangle generator");
  if (c.order < 1) throw ConfigError("space.order must be at least 1");
  if (2 * c.order + 1 > kMaxTriangleOrder && c.volume_order == 0) {
    throw ConfigError("space.order " + std::to_string(c.order) + " exceeds the embedded quadrature tables (max 6)");
  }
  if (c.volume_order < 0 || c.volume_order > kMaxTriangleOrder) throw ConfigError("space.volume_order out of range");
  if (c.edge_points < 0 || c.edge_points > kMaxEdgePoints) throw ConfigError("space.edge_points out of range");
  if (!(c.final_time > 0)) throw ConfigError("time.final must be positive");
  if (c.steps < 0) throw ConfigError("time.steps must be non-negative");
  if (c.k_cfl && !(*c.k_cfl > 0)) throw ConfigError("time.cfl must be positive");
  if (!(c.safety > 0)) throw ConfigError("time.safety must be positive");
  if (!(c.sound_speed > 0) || !(c.rho_bar > 0)) throw ConfigError("physics constants must be positive");
  if (c.lambda_override && !(*c.lambda_override > 0)) throw ConfigError("flux.lambda must be positive");
  switch (c.background.kind) {
    case BackgroundKind::Poiseuille:
      if (!(c.background.u_max > 0) || !(c.background.radius > 0) || !(c.background.viscosity > 0)) {
        throw ConfigError("poiseuille background needs positive u_max, radius and viscosity");
      }
      break;
    case BackgroundKind::Gridded:
      if (c.background.file.empty()) throw ConfigError("gridded background needs background.file");
      break;
    case BackgroundKind::Rest:
      break;
  }
  for (const auto& [tag, bc] : c.boundaries) {
    if (!c.entries.count("boundary." + std::to_string(tag) + ".type")) {
      throw ConfigError("boundary." + std::to_string(tag) + " has parameters but no type");
    }
  }
  if (c.initial.kind == InitialKind::Gaussian && !(c.initial.width > 0)) {
    throw ConfigError("initial.width must be positive");
  }
  if (c.output.subdivision < 0) throw ConfigError("output.subdivision must be non-negative");
  if (!c.transit.receiver.empty() &&
      std::none_of(c.probes.begin(), c.probes.end(), [&](const Probe& p) { return p.name == c.transit.receiver; })) {
    throw ConfigError("transit.receiver '" + c.transit.receiver + "' is not a probe");
  }
}

RectangleMeshSpec resolved_rectangle(const SimConfig& c) {
  RectangleMeshSpec spec = c.rectangle.value_or(RectangleMeshSpec{});
  if (c.mesh_h) {
    if (!(*c.mesh_h > 0)) throw ConfigError("mesh.h must be positive");
    spec.nx = std::max(1, static_cast<int>(std::lround(spec.width / *c.mesh_h)));
    spec.ny = std::max(1, static_cast<int>(std::lround(spec.height / *c.mesh_h)));
  }
  return spec;
}

std::string to_string(CflLength length) {
  switch (length) {
    case CflLength::Inradius: return "inradius";
    case CflLength::Nominal: return "nominal";
    case CflLength::MinAltitude: return "min_altitude";
    case CflLength::Circumdiameter: return "circumdiameter";
  }
  return "unknown";
}

std::uint64_t SimConfig::hash() const {
  // FNV-1a over the normalized entries.
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : entries) {
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  return h;
}

std::string SimConfig::hash_hex() const {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << hash();
  return ss.str();
}

}  // namespace rkdg
