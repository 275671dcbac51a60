#include "ucp/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ucp/error.hpp"

namespace ucp {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw Error(ErrorKind::Config, "key '" + key + "': '" + text + "' is not a number");
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw Error(ErrorKind::Config, "key '" + key + "': '" + text + "' is not an integer");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text)) out.push_back(parse_double(key, item));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + format_double(v[k]);
  return s;
}

struct Field {
  std::string section, key;
  std::function<nlohmann::json(const Scenario&)> get;
  std::function<std::string(const Scenario&)> text;
  std::function<void(Scenario&, const std::string&, const std::string&)> set;
};

Field number(std::string section, std::string key, double Scenario::*m) {
  return {section, key, [m](const Scenario& s) { return nlohmann::json(s.*m); },
          [m](const Scenario& s) { return format_double(s.*m); },
          [m](Scenario& s, const std::string& k, const std::string& v) { s.*m = parse_double(k, v); }};
}

Field integer(std::string section, std::string key, int Scenario::*m) {
  return {section, key, [m](const Scenario& s) { return nlohmann::json(s.*m); },
          [m](const Scenario& s) { return std::to_string(s.*m); },
          [m](Scenario& s, const std::string& k, const std::string& v) {
            s.*m = static_cast<int>(parse_integer(k, v));
          }};
}

Field text(std::string section, std::string key, std::string Scenario::*m) {
  return {section, key, [m](const Scenario& s) { return nlohmann::json(s.*m); },
          [m](const Scenario& s) { return s.*m; },
          [m](Scenario& s, const std::string&, const std::string& v) { s.*m = trim(v); }};
}

Field triple(std::string section, std::string key, std::array<double, 3> Scenario::*m) {
  return {section, key, [m](const Scenario& s) { return nlohmann::json(s.*m); },
          [m](const Scenario& s) { return join({(s.*m).begin(), (s.*m).end()}); },
          [m](Scenario& s, const std::string& k, const std::string& v) {
            const auto l = parse_list(k, v);
            if (l.size() != 3) throw Error(ErrorKind::Config, "key '" + k + "' needs three values");
            std::copy(l.begin(), l.end(), (s.*m).begin());
          }};
}

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(text("scenario", "name", &Scenario::name));
    f.push_back({"scenario", "seed", [](const Scenario& s) { return nlohmann::json(s.seed); },
                 [](const Scenario& s) { return std::to_string(s.seed); },
                 [](Scenario& s, const std::string& k, const std::string& v) {
                   const std::string t = trim(v);
                   std::uint64_t n = 0;
                   const auto r = std::from_chars(t.data(), t.data() + t.size(), n);
                   if (r.ec != std::errc() || r.ptr != t.data() + t.size())
                     throw Error(ErrorKind::Config, "key '" + k + "': '" + v + "' is not a non-negative integer");
                   s.seed = n;
                 }});
    f.push_back(text("boundary", "g", &Scenario::g));
    f.push_back(number("boundary", "r0", &Scenario::r0));
    f.push_back(number("boundary", "M0", &Scenario::M0));
    f.push_back(number("boundary", "alpha", &Scenario::alpha));
    f.push_back(text("material", "lambda", &Scenario::lambda));
    f.push_back(text("material", "mu", &Scenario::mu));
    f.push_back(number("material", "thickness", &Scenario::thickness));
    f.push_back(integer("solver", "mesh", &Scenario::mesh));
    f.push_back(integer("solver", "map_mesh", &Scenario::map_mesh));
    f.push_back(text("solver", "outer", &Scenario::outer));
    f.push_back(text("solver", "forcing", &Scenario::forcing));
    f.push_back(text("solver", "exact", &Scenario::exact));
    f.push_back(number("carleman", "epsilon", &Scenario::epsilon));
    f.push_back(number("carleman", "tau_min", &Scenario::tau_min));
    f.push_back(number("carleman", "tau_max", &Scenario::tau_max));
    f.push_back(integer("carleman", "tau_samples", &Scenario::tau_samples));
    f.push_back(number("carleman", "tau_bar", &Scenario::tau_bar));
    f.push_back(number("carleman", "R_tilde0", &Scenario::R_tilde0));
    f.push_back(text("carleman", "bump", &Scenario::bump));
    f.push_back(integer("carleman", "mesh", &Scenario::carleman_mesh));
    f.push_back(triple("three_spheres", "radii", &Scenario::radii));
    f.push_back(number("three_spheres", "R0_curved", &Scenario::R0_curved));
    f.push_back(number("three_spheres", "r1_fraction", &Scenario::r1_fraction));
    f.push_back(number("three_spheres", "r2_fraction", &Scenario::r2_fraction));
    f.push_back({"three_spheres", "exponents", [](const Scenario& s) { return nlohmann::json(s.exponents); },
                 [](const Scenario& s) { return join(s.exponents); },
                 [](Scenario& s, const std::string& k, const std::string& v) { s.exponents = parse_list(k, v); }});
    f.push_back(number("three_spheres", "ceiling", &Scenario::ceiling));
    f.push_back(triple("sucp", "radii", &Scenario::sucp_radii));
    f.push_back(number("sucp", "C", &Scenario::sucp_C));
    f.push_back(number("sucp", "c", &Scenario::sucp_c));
    f.push_back(text("output", "dir", &Scenario::out));
    f.push_back({"output", "stages", [](const Scenario& s) { return nlohmann::json(s.stages); },
                 [](const Scenario& s) {
                   std::string t;
                   for (std::size_t k = 0; k < s.stages.size(); ++k) t += (k ? "," : "") + s.stages[k];
                   return t;
                 },
                 [](Scenario& s, const std::string&, const std::string& v) { s.stages = split(v); }});
    return f;
  }();
  return fields;
}

}  // namespace

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names{"flatten", "solve", "reflect", "carleman", "three-spheres", "sucp"};
  return names;
}

bool Scenario::curved() const {
  const std::string t = trim(g);
  return !(t == "0" || t == "0.0");
}

Scenario Scenario::parse(const std::string& ini_text) {
  boost::property_tree::ptree tree;
  std::istringstream in(ini_text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::Config, std::string("malformed config: ") + e.message() + " at line " +
                                       std::to_string(e.line()));
  }
  Scenario s;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw Error(ErrorKind::Config, "key '" + section + "' is outside a section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto& fields = schema();
      const auto it = std::find_if(fields.begin(), fields.end(),
                                   [&](const Field& f) { return f.section == section && f.key == key; });
      if (it == fields.end()) throw Error(ErrorKind::Config, "unknown key '" + key + "' (" + full + ")");
      it->set(s, full, value.get_value<std::string>());
    }
  }
  s.validate();
  return s;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Scenario::to_ini() const {
  std::string out, section;
  for (const auto& f : schema()) {
    if (f.section != section) {
      out += (section.empty() ? "[" : "\n[") + f.section + "]\n";
      section = f.section;
    }
    out += f.key + " = " + f.text(*this) + "\n";
  }
  return out;
}

nlohmann::json Scenario::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& f : schema()) j[f.section][f.key] = f.get(*this);
  return j;
}

void Scenario::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
  if (name.empty()) fail("scenario.name is empty");
  if (mesh < 9 || mesh % 2 == 0) fail("solver.mesh must be odd and at least 9");
  if (map_mesh < 9) fail("solver.map_mesh must be at least 9");
  if (carleman_mesh < 33) fail("carleman.mesh must be at least 33");
  if (!(r0 > 0.0 && M0 > 0.0 && alpha > 0.0 && alpha <= 1.0)) fail("boundary needs r0 > 0, M0 > 0, 0 < alpha <= 1");
  if (!(thickness > 0.0)) fail("material.thickness must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail("carleman.epsilon must lie in (0, 1)");
  if (!(tau_min <= tau_max) || tau_samples < 1) fail("carleman needs tau_min <= tau_max and tau_samples >= 1");
  if (tau_samples == 1 && tau_min != tau_max) fail("carleman.tau_samples = 1 needs tau_min = tau_max");
  if (!(0.0 < radii[0] && radii[0] < radii[1] && radii[1] < radii[2] / 2.0 && radii[2] < 1.0))
    fail("three_spheres.radii need 0 < r < R < R0/2 < R0 < 1");
  if (!(R0_curved > 0.0 && R0_curved < 1.0)) fail("three_spheres.R0_curved must lie in (0, 1)");
  if (!(0.0 < r1_fraction && r1_fraction < r2_fraction && r2_fraction < 1.0))
    fail("three_spheres needs 0 < r1_fraction < r2_fraction < 1");
  if (exponents.empty()) fail("three_spheres.exponents is empty");
  if (!(ceiling > 0.0)) fail("three_spheres.ceiling must be positive");
  if (!(sucp_C > 1.0 && sucp_c > 0.0 && sucp_c < 1.0)) fail("sucp needs C > 1 and 0 < c < 1");
  if (!(0.0 < sucp_radii[0] && sucp_radii[0] < sucp_radii[1] && sucp_radii[1] < sucp_c * sucp_radii[2]))
    fail("sucp.radii need r1 < r2 < c r0");
  if (sucp_radii[2] >= 1.0) fail("sucp r0 must stay inside the solver box (r0 < 1)");
  if (stages.empty()) fail("output.stages is empty");
  std::set<std::string> seen;
  for (const auto& st : stages) {
    if (std::find(stage_names().begin(), stage_names().end(), st) == stage_names().end())
      fail("unknown stage '" + st + "' in output.stages");
    if (!seen.insert(st).second) fail("stage '" + st + "' listed twice");
  }
  if (curved()) {
    const std::string f = trim(forcing);
    if (!(f == "0" || f == "0.0")) fail("solver.forcing must be 0 for a curved boundary");
    if (!exact.empty()) fail("solver.exact is only supported for a flat boundary");
  }
}

std::filesystem::path bundled_scenario_dir() { return UCP_SCENARIO_DIR; }

std::vector<std::string> bundled_scenarios() {
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(bundled_scenario_dir()))
    if (e.path().extension() == ".ini") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

std::filesystem::path resolve_scenario(const std::string& name_or_path) {
  const std::filesystem::path p(name_or_path);
  if (p.has_extension() || p.has_parent_path()) return p;
  return bundled_scenario_dir() / (name_or_path + ".ini");
}

std::string tool_version() { return UCP_VERSION; }

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidInput, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ucp
