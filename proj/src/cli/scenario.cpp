#include "afcxpm/cli/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "afcxpm/errors.hpp"

namespace afcxpm::cli {

namespace {

using Handler = std::function<void(const YAML::Node&, const std::string&)>;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void walk(const YAML::Node& node, const std::string& path, const std::map<std::string, Handler>& handlers)
{
    if (!node || node.IsNull()) return;
    if (!node.IsMap()) throw ConfigError((path.empty() ? std::string("scenario") : path) + ": expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        const auto it = handlers.find(key);
        if (it == handlers.end()) {
            std::string known;
            for (const auto& [k, _] : handlers) known += (known.empty() ? "" : ", ") + k;
            throw ConfigError("unknown key '" + join(path, key) + "' (allowed: " + known + ")");
        }
        it->second(kv.second, join(path, key));
    }
}

double number(const YAML::Node& n, const std::string& path)
{
    if (!n.IsScalar()) throw ConfigError(path + ": expected a number");
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        throw ConfigError(path + ": expected a number (got '" + n.Scalar() + "')");
    }
}

long long integer(const YAML::Node& n, const std::string& path)
{
    const double v = number(n, path);
    if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError(path + ": expected an integer");
    return static_cast<long long>(v);
}

bool boolean(const YAML::Node& n, const std::string& path)
{
    if (!n.IsScalar()) throw ConfigError(path + ": expected true or false");
    try {
        return n.as<bool>();
    } catch (const YAML::Exception&) {
        throw ConfigError(path + ": expected true or false (got '" + n.Scalar() + "')");
    }
}

std::string text(const YAML::Node& n, const std::string& path)
{
    if (!n.IsScalar()) throw ConfigError(path + ": expected a string");
    return n.Scalar();
}

std::vector<double> numbers(const YAML::Node& n, const std::string& path)
{
    if (!n.IsSequence()) throw ConfigError(path + ": expected a list of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < n.size(); ++i) v.push_back(number(n[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

std::string show(double v)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << v;
    return os.str();
}

double positive(double v, const std::string& path)
{
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(path + " must be positive (> 0), got " + show(v));
    return v;
}

double non_negative(double v, const std::string& path)
{
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(path + " must be non-negative (>= 0), got " + show(v));
    return v;
}

int positive_int(const YAML::Node& n, const std::string& path, int min = 1)
{
    const long long v = integer(n, path);
    if (v < min || v > 1'000'000'000) throw ConfigError(path + " must be an integer >= " + std::to_string(min));
    return static_cast<int>(v);
}

Range range(const YAML::Node& n, const std::string& path)
{
    Range r;
    bool has_min = false, has_max = false;
    walk(n, path,
         {{"min", [&](const YAML::Node& v, const std::string& p) { r.min = number(v, p); has_min = true; }},
          {"max", [&](const YAML::Node& v, const std::string& p) { r.max = number(v, p); has_max = true; }},
          {"step", [&](const YAML::Node& v, const std::string& p) { r.step = positive(number(v, p), p); }}});
    if (!has_min || !has_max) throw ConfigError(path + " needs both min and max");
    if (r.max < r.min) throw ConfigError(path + ".max must be >= " + path + ".min");
    return r;
}

void parse_into(Scenario& s, const YAML::Node& root, const std::optional<std::string>& preset)
{
    if (preset) {
        apply_preset(s, *preset);
    } else if (root && root.IsMap() && root["preset"]) {
        apply_preset(s, text(root["preset"], "preset"));
    }

    bool radius_given = false;
    bool area_given = false;
    walk(root, "",
         {{"preset", [](const YAML::Node&, const std::string&) {}},
          {"material",
           [&](const YAML::Node& n, const std::string& path) {
               walk(n, path,
                    {{"lambda0_nm",
                      [&](const YAML::Node& v, const std::string& p) { s.material.lambda0 = positive(number(v, p), p) * 1e-9; }},
                     {"refractive_index",
                      [&](const YAML::Node& v, const std::string& p) { s.material.n = positive(number(v, p), p); }},
                     {"gamma_hz",
                      [&](const YAML::Node& v, const std::string& p) { s.material.gamma = positive(number(v, p), p); }},
                     {"mode_radius_um",
                      [&](const YAML::Node& v, const std::string& p) {
                          s.material.area = circular_area(positive(number(v, p), p) * 1e-6);
                          s.small_waveguide = false;
                          radius_given = true;
                      }},
                     {"area_um2",
                      [&](const YAML::Node& v, const std::string& p) {
                          s.material.area = positive(number(v, p), p) * 1e-12;
                          s.small_waveguide = false;
                          area_given = true;
                      }},
                     {"small_waveguide",
                      [&](const YAML::Node& v, const std::string& p) { s.small_waveguide = boolean(v, p); }},
                     {"length_mm",
                      [&](const YAML::Node& v, const std::string& p) { s.material.length = positive(number(v, p), p) * 1e-3; }}});
           }},
          {"comb",
           [&](const YAML::Node& n, const std::string& path) {
               walk(n, path,
                    {{"spacing_mhz",
                      [&](const YAML::Node& v, const std::string& p) { s.comb.delta_m = mhz_to_angular(positive(number(v, p), p)); }},
                     {"n_teeth", [&](const YAML::Node& v, const std::string& p) { s.comb.n_teeth = positive_int(v, p); }},
                     {"finesse", [&](const YAML::Node& v, const std::string& p) { s.comb.finesse = positive(number(v, p), p); }},
                     {"peak_od", [&](const YAML::Node& v, const std::string& p) { s.comb.peak_od = non_negative(number(v, p), p); }},
                     {"background_od",
                      [&](const YAML::Node& v, const std::string& p) { s.comb.background_od = non_negative(number(v, p), p); }},
                     {"pit_width_mhz",
                      [&](const YAML::Node& v, const std::string& p) { s.comb.pit_width = non_negative(number(v, p), p) * 1e6; }},
                     {"pit_gap_mhz",
                      [&](const YAML::Node& v, const std::string& p) { s.comb.pit_gap = non_negative(number(v, p), p) * 1e6; }},
                     {"pit_od", [&](const YAML::Node& v, const std::string& p) { s.comb.pit_od = non_negative(number(v, p), p); }},
                     {"pit_db",
                      [&](const YAML::Node& v, const std::string& p) { s.comb.pit_od = od_from_db(non_negative(number(v, p), p)); }},
                     {"tooth_shape",
                      [&](const YAML::Node& v, const std::string& p) { s.comb.tooth_shape = parse_tooth_shape(text(v, p)); }},
                     {"normalization", [&](const YAML::Node& v, const std::string& p) {
                          s.comb.normalization = parse_tooth_normalization(text(v, p));
                      }}});
           }},
          {"grid",
           [&](const YAML::Node& n, const std::string& path) {
               walk(n, path,
                    {{"points", [&](const YAML::Node& v, const std::string& p) { s.grid.points = positive_int(v, p, 2); }},
                     {"half_span_mhz", [&](const YAML::Node& v, const std::string& p) {
                          s.grid.half_span = mhz_to_angular(positive(number(v, p), p));
                      }}});
           }},
          {"probe",
           [&](const YAML::Node& n, const std::string& path) {
               walk(n, path,
                    {{"duration_ns",
                      [&](const YAML::Node& v, const std::string& p) { s.probe.duration = positive(number(v, p), p) * 1e-9; }},
                     {"pulse_area", [&](const YAML::Node& v, const std::string& p) {
                          s.probe.pulse_area = non_negative(number(v, p), p);
                      }}});
           }},
          {"signal",
           [&](const YAML::Node& n, const std::string& path) {
               walk(n, path,
                    {{"photons", [&](const YAML::Node& v, const std::string& p) { s.signal.photons = non_negative(number(v, p), p); }},
                     {"detuning_mhz",
                      [&](const YAML::Node& v, const std::string& p) {
                          const double mhz = number(v, p);
                          if (mhz == 0.0 || !std::isfinite(mhz)) throw ConfigError(p + " must be non-zero");
                          s.signal.detuning = mhz_to_angular(mhz);
                      }},
                     {"passes", [&](const YAML::Node& v, const std::string& p) { s.signal.passes = positive_int(v, p); }},
                     {"transfer", [&](const YAML::Node& v, const std::string& p) { s.signal.transfer = boolean(v, p); }},
                     {"state", [&](const YAML::Node& v, const std::string& p) { s.signal.state = parse_time_bin(text(v, p)); }},
                     {"offset_ns",
                      [&](const YAML::Node& v, const std::string& p) { s.signal.offset = non_negative(number(v, p), p) * 1e-9; }},
                     {"mode_duration_ns",
                      [&](const YAML::Node& v, const std::string& p) { s.signal.mode_duration = positive(number(v, p), p) * 1e-9; }},
                     {"separation_ns", [&](const YAML::Node& v, const std::string& p) {
                          s.signal.separation = positive(number(v, p), p) * 1e-9;
                      }}});
           }},
          {"solver",
           [&](const YAML::Node& n, const std::string& path) {
               walk(n, path,
                    {{"z_slices", [&](const YAML::Node& v, const std::string& p) { s.solver.z_slices = positive_int(v, p); }},
                     {"points_per_period",
                      [&](const YAML::Node& v, const std::string& p) { s.solver.points_per_period = positive_int(v, p, 0); }},
                     {"margin_periods",
                      [&](const YAML::Node& v, const std::string& p) { s.solver.margin_periods = positive_int(v, p, 0); }},
                     {"steps_per_storage",
                      [&](const YAML::Node& v, const std::string& p) { s.solver.steps_per_storage = positive_int(v, p, 0); }},
                     {"include_decay",
                      [&](const YAML::Node& v, const std::string& p) { s.solver.include_decay = boolean(v, p); }},
                     {"strong", [&](const YAML::Node& v, const std::string& p) { s.solver.strong = boolean(v, p); }}});
           }},
          {"measurement",
           [&](const YAML::Node& n, const std::string& path) {
               auto& r = s.readout;
               walk(n, path,
                    {{"visibility", [&](const YAML::Node& v, const std::string& p) { r.visibility = number(v, p); }},
                     {"bias_rad", [&](const YAML::Node& v, const std::string& p) { r.bias = number(v, p); }},
                     {"lo_match", [&](const YAML::Node& v, const std::string& p) { r.lo_match = positive(number(v, p), p); }},
                     {"shot_to_shot_sigma_rad",
                      [&](const YAML::Node& v, const std::string& p) { r.noise.shot_to_shot_sigma = non_negative(number(v, p), p); }},
                     {"reference_residual_sigma_rad",
                      [&](const YAML::Node& v, const std::string& p) {
                          r.noise.reference_residual_sigma = non_negative(number(v, p), p);
                      }},
                     {"detector_sigma_rad",
                      [&](const YAML::Node& v, const std::string& p) { r.noise.detector_sigma = non_negative(number(v, p), p); }},
                     {"reference_correlation_weight",
                      [&](const YAML::Node& v, const std::string& p) {
                          r.noise.reference_correlation_weight = non_negative(number(v, p), p);
                      }},
                     {"repetitions", [&](const YAML::Node& v, const std::string& p) { s.sweep.repetitions = positive_int(v, p); }},
                     {"photon_levels", [&](const YAML::Node& v, const std::string& p) { s.sweep.photon_levels = numbers(v, p); }},
                     {"detunings_mhz",
                      [&](const YAML::Node& v, const std::string& p) {
                          s.sweep.detunings.clear();
                          for (double mhz : numbers(v, p)) {
                              if (mhz == 0.0) throw ConfigError(p + " entries must be non-zero");
                              s.sweep.detunings.push_back(mhz_to_angular(mhz));
                          }
                      }},
                     {"analyzer_visibility",
                      [&](const YAML::Node& v, const std::string& p) { s.analyzer_visibility = number(v, p); }},
                     {"late_background",
                      [&](const YAML::Node& v, const std::string& p) { s.late_background = non_negative(number(v, p), p); }},
                     {"zeta_l", [&](const YAML::Node& v, const std::string& p) { s.zeta_l = non_negative(number(v, p), p); }}});
           }},
          {"design",
           [&](const YAML::Node& n, const std::string& path) {
               auto& d = s.design;
               walk(n, path,
                    {{"d", [&](const YAML::Node& v, const std::string& p) { d.d = positive(number(v, p), p); }},
                     {"finesse", [&](const YAML::Node& v, const std::string& p) { d.finesse = positive(number(v, p), p); }},
                     {"n_teeth", [&](const YAML::Node& v, const std::string& p) { d.n_teeth = positive_int(v, p); }},
                     {"f", [&](const YAML::Node& v, const std::string& p) { d.f = number(v, p); }},
                     {"passes", [&](const YAML::Node& v, const std::string& p) { d.passes = positive_int(v, p); }},
                     {"bandwidth_khz",
                      [&](const YAML::Node& v, const std::string& p) { d.bandwidth_hz = non_negative(number(v, p), p) * 1e3; }},
                     {"loss_budget", [&](const YAML::Node& v, const std::string& p) { s.loss_budget = non_negative(number(v, p), p); }}});
           }},
          {"search",
           [&](const YAML::Node& n, const std::string& path) {
               walk(n, path,
                    {{"d", [&](const YAML::Node& v, const std::string& p) { s.ranges.d = range(v, p); }},
                     {"finesse", [&](const YAML::Node& v, const std::string& p) { s.ranges.finesse = range(v, p); }},
                     {"n_teeth", [&](const YAML::Node& v, const std::string& p) { s.ranges.n_teeth = range(v, p); }},
                     {"f", [&](const YAML::Node& v, const std::string& p) { s.ranges.f = range(v, p); }},
                     {"bandwidth_khz",
                      [&](const YAML::Node& v, const std::string& p) {
                          s.design.bandwidth_hz = non_negative(number(v, p), p) * 1e3;
                      }},
                     {"loss_budget", [&](const YAML::Node& v, const std::string& p) { s.loss_budget = non_negative(number(v, p), p); }}});
           }},
          {"run", [&](const YAML::Node& n, const std::string& path) {
               walk(n, path,
                    {{"seed",
                      [&](const YAML::Node& v, const std::string& p) {
                          try {
                              s.run.seed = v.as<std::uint64_t>();
                          } catch (const YAML::Exception&) {
                              throw ConfigError(p + ": expected an unsigned 64-bit integer");
                          }
                      }},
                     {"threads", [&](const YAML::Node& v, const std::string& p) { s.run.threads = positive_int(v, p); }},
                     {"out", [&](const YAML::Node& v, const std::string& p) { s.run.out = text(v, p); }}});
           }}});

    if (radius_given && area_given) throw ConfigError("material: give either mode_radius_um or area_um2, not both");
    if (s.small_waveguide) s.material.area = small_waveguide_area(s.material.lambda0, s.material.n);
    s.design.params = s.material;
    s.readout.noise.seed = s.run.seed;
    s.validate();
}

}  // namespace

void Scenario::validate() const
{
    material.validate();
    comb.validate();
    if (signal.passes < 1) throw ConfigError("signal.passes must be >= 1");
    if (!(readout.visibility >= 0.0 && readout.visibility <= 1.0)) {
        throw ConfigError("measurement.visibility must lie in [0, 1]");
    }
    if (!(analyzer_visibility >= 0.0 && analyzer_visibility <= 1.0)) {
        throw ConfigError("measurement.analyzer_visibility must lie in [0, 1]");
    }
    readout.validate();
    if (sweep.photon_levels.size() < 3) throw ConfigError("measurement.photon_levels needs at least 3 levels");
    if (sweep.detunings.empty()) throw ConfigError("measurement.detunings_mhz must not be empty");
    if (!(design.f > 1.0)) throw ConfigError("design.f must be > 1");
    design.validate();
    if (run.threads < 1) throw ConfigError("run.threads must be >= 1");
}

Scenario default_scenario() { return Scenario{}; }

void apply_preset(Scenario& s, std::string_view name)
{
    const auto m = material_preset(name);
    if (!m) {
        std::string known;
        for (auto n : material_preset_names()) known += (known.empty() ? "" : ", ") + std::string(n);
        throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
    }
    s.preset = std::string(name);
    s.material = *m;
    s.small_waveguide = name == "example_si_v";
    s.design.params = s.material;
}

Scenario parse_scenario_text(const std::string& yaml, const std::string& source,
                             const std::optional<std::string>& preset)
{
    Scenario s = default_scenario();
    YAML::Node root;
    try {
        root = YAML::Load(yaml);
    } catch (const YAML::Exception& e) {
        throw ConfigError(source + ": malformed YAML: " + e.what());
    }
    try {
        parse_into(s, root, preset);
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return s;
}

Scenario parse_scenario(const std::filesystem::path& path, const std::optional<std::string>& preset)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path.string(), preset);
}

nlohmann::json to_json(const Scenario& s)
{
    using nlohmann::json;
    json j;
    j["preset"] = s.preset;
    j["material"] = {{"lambda0_nm", s.material.lambda0 * 1e9},
                     {"refractive_index", s.material.n},
                     {"gamma_hz", s.material.gamma},
                     {"area_um2", s.material.area * 1e12},
                     {"small_waveguide", s.small_waveguide},
                     {"length_mm", s.material.length * 1e3}};
    j["comb"] = {{"spacing_mhz", angular_to_mhz(s.comb.delta_m)},
                 {"n_teeth", s.comb.n_teeth},
                 {"finesse", s.comb.finesse},
                 {"peak_od", s.comb.peak_od},
                 {"background_od", s.comb.background_od},
                 {"pit_width_mhz", s.comb.pit_width * 1e-6},
                 {"pit_gap_mhz", s.comb.pit_gap * 1e-6},
                 {"pit_od", s.comb.pit_od},
                 {"tooth_shape", std::string(to_string(s.comb.tooth_shape))},
                 {"normalization", std::string(to_string(s.comb.normalization))}};
    j["grid"] = {{"points", s.grid.points}, {"half_span_mhz", angular_to_mhz(s.grid.half_span)}};
    j["probe"] = {{"duration_ns", s.probe.duration * 1e9}, {"pulse_area", s.probe.pulse_area}};
    j["signal"] = {{"photons", s.signal.photons},
                   {"detuning_mhz", angular_to_mhz(s.signal.detuning)},
                   {"passes", s.signal.passes},
                   {"transfer", s.signal.transfer},
                   {"state", std::string(to_string(s.signal.state))},
                   {"offset_ns", s.signal.offset * 1e9},
                   {"mode_duration_ns", s.signal.mode_duration * 1e9},
                   {"separation_ns", s.signal.separation * 1e9}};
    j["solver"] = {{"z_slices", s.solver.z_slices},
                   {"points_per_period", s.solver.points_per_period},
                   {"margin_periods", s.solver.margin_periods},
                   {"steps_per_storage", s.solver.steps_per_storage},
                   {"include_decay", s.solver.include_decay},
                   {"strong", s.solver.strong}};
    std::vector<double> det_mhz;
    for (double d : s.sweep.detunings) det_mhz.push_back(angular_to_mhz(d));
    j["measurement"] = {{"visibility", s.readout.visibility},
                        {"bias_rad", s.readout.bias},
                        {"lo_match", s.readout.lo_match},
                        {"shot_to_shot_sigma_rad", s.readout.noise.shot_to_shot_sigma},
                        {"reference_residual_sigma_rad", s.readout.noise.reference_residual_sigma},
                        {"detector_sigma_rad", s.readout.noise.detector_sigma},
                        {"reference_correlation_weight", s.readout.noise.reference_correlation_weight},
                        {"repetitions", s.sweep.repetitions},
                        {"photon_levels", s.sweep.photon_levels},
                        {"detunings_mhz", det_mhz},
                        {"analyzer_visibility", s.analyzer_visibility},
                        {"late_background", s.late_background},
                        {"zeta_l", s.zeta_l}};
    j["design"] = {{"d", s.design.d},
                   {"finesse", s.design.finesse},
                   {"n_teeth", s.design.n_teeth},
                   {"f", s.design.f},
                   {"passes", s.design.passes},
                   {"bandwidth_khz", s.design.bandwidth_hz * 1e-3},
                   {"loss_budget", s.loss_budget}};
    auto range_json = [](const Range& r) { return json{{"min", r.min}, {"max", r.max}, {"step", r.step}}; };
    j["search"] = {{"d", range_json(s.ranges.d)},
                   {"finesse", range_json(s.ranges.finesse)},
                   {"n_teeth", range_json(s.ranges.n_teeth)},
                   {"f", range_json(s.ranges.f)}};
    j["run"] = {{"seed", s.run.seed}, {"threads", s.run.threads}, {"out", s.run.out}};
    return j;
}

}  // namespace afcxpm::cli
