// properdiv: proper divergence functions between probability distributions,
// propriety audits, and gridded model evaluation.
//
// Subcommands:
//   div        divergence between two sample files
//   audit      Monte Carlo k-propriety check of a scenario or builtin family
//   grid-eval  per-cell divergences, spatial averages, and model ranking
//   catalogue  list all divergences with their propriety status
//
// stdout carries machine-readable payload only; diagnostics go to stderr.
// Exit codes: 0 success, 2 input/parse error, 3 math/domain error,
// 4 data-compatibility error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "properdiv/divergences.hpp"
#include "properdiv/errors.hpp"
#include "properdiv/grid.hpp"
#include "properdiv/measures.hpp"
#include "properdiv/propriety.hpp"

namespace {

using nlohmann::json;
using namespace properdiv;

json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (v > 0.0) return "inf";
  if (v < 0.0) return "-inf";
  return "nan";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Sample file: one real per line, or CSV with header "value", or a daily
// series "date,value" which is reduced to its annual maxima.
std::vector<double> load_samples(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t row = 0;
  std::vector<double> values;
  bool csv_value = false, csv_daily = false;
  std::vector<std::pair<Date, double>> daily;

  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row == 1) {
      if (line == "value") {
        csv_value = true;
        continue;
      }
      if (line == "date,value") {
        csv_daily = true;
        continue;
      }
    }
    try {
      if (csv_daily) {
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
          throw InvalidInput("expected date,value");
        }
        daily.emplace_back(parse_date(line.substr(0, comma)),
                           std::stod(line.substr(comma + 1)));
      } else {
        std::size_t used = 0;
        const double v = std::stod(line, &used);
        if (used != line.size() || !std::isfinite(v)) {
          throw InvalidInput("expected a finite number, got '" + line + "'");
        }
        values.push_back(v);
      }
    } catch (const std::exception& e) {
      throw ParseError(std::string(e.what()) + " in '" + path + "'", row);
    }
    (void)csv_value;
  }
  if (csv_daily) {
    for (const AnnualMax& am : annual_maxima(daily)) {
      values.push_back(am.value);
    }
  }
  if (values.empty()) throw EmptyDataset("no values in '" + path + "'");
  return values;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InvalidInput(std::string("bad ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidInput(std::string("empty ") + what + " list");
  return out;
}

// "1..25" or "1,2,5,6,10"
std::vector<int> parse_k_list(const std::string& text) {
  std::vector<int> out;
  const std::size_t dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      const int hi = std::stoi(text.substr(dots + 2));
      if (lo < 1 || hi < lo) throw InvalidInput("bad k range '" + text + "'");
      for (int k = lo; k <= hi; ++k) out.push_back(k);
      return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  } catch (const InvalidInput&) {
    throw;
  } catch (const std::exception&) {
    throw InvalidInput("bad k list '" + text + "'");
  }
  if (out.empty()) throw InvalidInput("empty k list");
  for (int k : out) {
    if (k < 1) throw InvalidInput("k values must be >= 1");
  }
  return out;
}

struct ConfigFile {
  json data = json::object();

  void load(const std::string& path) {
    try {
      data = json::parse(read_file(path));
    } catch (const json::exception& e) {
      throw InvalidInput(std::string("config: bad JSON: ") + e.what());
    }
    if (!data.is_object()) throw InvalidInput("config: expected an object");
  }

  // config values apply only where the flag was not given explicitly
  template <typename T>
  void merge(const CLI::Option* opt, const char* key, T& value) const {
    if (opt->count() == 0 && data.contains(key)) {
      try {
        value = data.at(key).get<T>();
      } catch (const json::exception& e) {
        throw InvalidInput(std::string("config: key '") + key + "': " +
                           e.what());
      }
    }
  }

  bool has(const CLI::Option* opt, const char* key) const {
    return opt->count() > 0 || data.contains(key);
  }
};

json verdict_to_json(const ProprietyVerdict& verdict) {
  return json::parse(verdict.to_json());
}

int cmd_div(const std::string& file_f, const std::string& file_g,
            const std::string& spec_json, const std::string& units,
            const std::string& bins) {
  const DivergenceSpec spec = DivergenceSpec::parse(spec_json);
  const std::vector<double> xs = load_samples(file_f);
  const std::vector<double> ys = load_samples(file_g);

  DivergenceValue value{0.0, "", spec};
  if (spec.categorical()) {
    if (bins.empty()) {
      throw InvalidInput(
          "categorical divergence on sample files requires --bins");
    }
    const std::vector<double> edges = parse_double_list(bins, "bin edge");
    const CategoricalDist f = bin_to_categorical(xs, edges);
    const CategoricalDist g = bin_to_categorical(ys, edges);
    value = eval_divergence(spec, f, g, units);
  } else {
    value = eval_divergence(spec, EmpiricalMeasure(xs).as_cdf(),
                            EmpiricalMeasure(ys).as_cdf(), units);
  }

  if (spec.propriety() == Propriety::ImproperVariant) {
    std::cerr << "warning: " << to_string(spec.id)
              << " is an improper variant; rankings based on it can reward "
                 "misreporting\n";
  }
  json out{{"value", json_number(value.value)},
           {"units", value.units},
           {"propriety", std::string(to_string(spec.propriety()))}};
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_audit(const std::optional<std::string>& scenario_path,
              const std::string& family, const std::string& k_list,
              double f1, double g1, const McConfig& cfg) {
  json out;
  out["config"] = {{"n_reps", cfg.n_reps},
                   {"seed", cfg.seed},
                   {"confidence", cfg.confidence}};

  if (scenario_path) {
    const Scenario scenario = Scenario::parse(read_file(*scenario_path));
    out["scenario"] = json::parse(scenario.to_json());
    out["results"] = verdict_to_json(propriety_check(scenario, cfg))["per_k"];
  } else if (!family.empty()) {
    const std::vector<int> ks = parse_k_list(k_list);
    json results = json::array();
    for (int k : ks) {
      CounterexampleFamily fam{};
      if (family == "av-uniform") {
        fam.id = FamilyId::AvUniform;
        fam.k = k;
      } else if (family == "ks-uniform") {
        fam.id = FamilyId::KsUniform;
        fam.k = k;
      } else if (family == "hellinger") {
        fam.id = FamilyId::HellingerBinary;
        fam.k = k;
        fam.f1 = f1;
        fam.g1 = g1;
      } else {
        throw InvalidInput("unknown family '" + family +
                           "' (use av-uniform, ks-uniform, or hellinger)");
      }
      const Scenario scenario = build_counterexample(fam);
      const json verdict = verdict_to_json(propriety_check(scenario, cfg));
      for (const auto& rec : verdict.at("per_k")) {
        results.push_back(rec);
      }
    }
    out["family"] = family;
    if (family == "hellinger") {
      out["f1"] = f1;
      out["g1"] = g1;
    }
    out["results"] = results;
  } else {
    throw InvalidInput("audit: provide --scenario FILE or --family NAME");
  }

  std::cout << out.dump() << "\n";
  return 0;  // a detected impropriety is a result, not an error
}

int cmd_grid_eval(const std::vector<std::string>& model_paths,
                  const std::string& ref1_path, const std::string& ref2_path,
                  const std::string& spec_json, const std::string& out_dir,
                  const std::string& units, const std::string& bins,
                  int min_days) {
  const DivergenceSpec spec = DivergenceSpec::parse(spec_json);
  GridEvalOptions opts;
  opts.data_unit = units;
  if (!bins.empty()) opts.bin_edges = parse_double_list(bins, "bin edge");

  LoadOptions load_opts;
  load_opts.min_days = min_days;
  const GridDataset ref1 = load_grid_dataset(ref1_path, load_opts);
  const GridDataset ref2 = load_grid_dataset(ref2_path, load_opts);
  std::vector<GridDataset> models;
  models.reserve(model_paths.size());
  for (const std::string& path : model_paths) {
    models.push_back(load_grid_dataset(path, load_opts));
  }

  if (spec.propriety() == Propriety::ImproperVariant) {
    std::cerr << "warning: ranking with improper variant "
              << to_string(spec.id) << "; see the propriety_warning field\n";
  }

  const RankingTable table = rank_models(models, ref1, ref2, spec, opts);

  auto write_out = [&](const std::string& name, const std::string& content) {
    const std::string path = out_dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << content;
    return path;
  };

  std::vector<std::string> written;
  written.push_back(write_out("ranking.csv", ranking_csv(table)));
  written.push_back(write_out("scatter.json", scatter_json(table)));
  for (const GridDataset& model : models) {
    for (const GridDataset* ref : {&ref1, &ref2}) {
      const DivergenceMap map = per_cell_divergence(model, *ref, spec, opts);
      written.push_back(write_out(
          "map_" + model.dataset_id + "__vs__" + ref->dataset_id + ".csv",
          divergence_map_csv(map)));
    }
  }

  json out{{"out_dir", out_dir},
           {"files", written},
           {"baseline", json_number(table.baseline)},
           {"baseline_n_cells", table.baseline_n_cells},
           {"propriety_warning", table.propriety_warning}};
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_catalogue() {
  std::string out = "id,propriety,units\n";
  for (const DivergenceSpec& spec : divergence_catalogue()) {
    out += std::string(to_string(spec.id));
    out += ',';
    out += std::string(to_string(spec.propriety()));
    out += ',';
    out += units_string(spec, "");
    out += '\n';
  }
  std::cout << out;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "proper divergence functions: computation, propriety audits, and "
      "gridded model evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config file; explicit flags take precedence");

  // div
  auto* div = app.add_subcommand("div", "divergence between two sample files");
  std::string div_f, div_g, div_spec = R"({"id":"IQ"})", div_units, div_bins;
  div->add_option("file_f", div_f, "forecast sample file")->required();
  div->add_option("file_g", div_g, "observation sample file")->required();
  auto* div_spec_opt =
      div->add_option("--spec", div_spec, "divergence spec JSON");
  auto* div_units_opt =
      div->add_option("--units", div_units, "physical data unit label");
  auto* div_bins_opt = div->add_option(
      "--bins", div_bins, "bin edges for categorical divergences, e.g. 0,0.5,1");

  // audit
  auto* audit =
      app.add_subcommand("audit", "Monte Carlo k-propriety check");
  std::string audit_scenario, audit_family, audit_k = "1";
  double audit_f1 = 0.10, audit_g1 = 0.25, audit_conf = 0.99;
  std::int64_t audit_reps = 100000;
  std::uint64_t audit_seed = 0;
  auto* sc_opt =
      audit->add_option("--scenario", audit_scenario, "scenario JSON file");
  auto* fam_opt = audit->add_option(
      "--family", audit_family, "builtin family: av-uniform, ks-uniform, hellinger");
  auto* k_opt = audit->add_option("--k", audit_k, "k values: '1..25' or '1,2,5'");
  auto* f1_opt = audit->add_option("--f1", audit_f1, "hellinger: candidate f1");
  auto* g1_opt = audit->add_option("--g1", audit_g1, "hellinger: truth g1");
  auto* reps_opt = audit->add_option("--reps", audit_reps, "replicates");
  auto* seed_opt = audit->add_option("--seed", audit_seed,
                                     "RNG seed (required: no silent entropy)");
  auto* conf_opt = audit->add_option("--confidence", audit_conf,
                                     "one-sided confidence level");

  // grid-eval
  auto* grid = app.add_subcommand(
      "grid-eval", "rank model grids against two reference grids");
  std::vector<std::string> grid_models;
  std::string grid_ref1, grid_ref2, grid_spec = R"({"id":"IQ"})";
  std::string grid_out = ".", grid_units, grid_bins;
  int grid_min_days = 300;
  grid->add_option("models", grid_models, "model grid CSV files")
      ->required()
      ->expected(-1);
  grid->add_option("--ref1", grid_ref1, "first reference grid CSV")->required();
  grid->add_option("--ref2", grid_ref2, "second reference grid CSV")
      ->required();
  auto* grid_spec_opt =
      grid->add_option("--spec", grid_spec, "divergence spec JSON");
  auto* grid_out_opt =
      grid->add_option("--out-dir", grid_out, "output directory");
  auto* grid_units_opt =
      grid->add_option("--units", grid_units, "physical data unit label");
  auto* grid_bins_opt =
      grid->add_option("--bins", grid_bins, "bin edges for categorical specs");
  auto* grid_days_opt = grid->add_option(
      "--min-days", grid_min_days,
      "daily inputs: entries required for a complete year");

  // catalogue
  app.add_subcommand("catalogue",
                     "list all divergences with propriety status");

  CLI11_PARSE(app, argc, argv);

  try {
    ConfigFile cfg_file;
    if (!config_path.empty()) cfg_file.load(config_path);

    if (app.got_subcommand("div")) {
      cfg_file.merge(div_spec_opt, "spec", div_spec);
      cfg_file.merge(div_units_opt, "units", div_units);
      cfg_file.merge(div_bins_opt, "bins", div_bins);
      return cmd_div(div_f, div_g, div_spec, div_units, div_bins);
    }
    if (app.got_subcommand("audit")) {
      cfg_file.merge(k_opt, "k", audit_k);
      cfg_file.merge(f1_opt, "f1", audit_f1);
      cfg_file.merge(g1_opt, "g1", audit_g1);
      cfg_file.merge(reps_opt, "reps", audit_reps);
      cfg_file.merge(seed_opt, "seed", audit_seed);
      cfg_file.merge(conf_opt, "confidence", audit_conf);
      if (!cfg_file.has(seed_opt, "seed")) {
        throw InvalidInput("audit: --seed is required");
      }
      McConfig cfg;
      cfg.n_reps = audit_reps;
      cfg.seed = audit_seed;
      cfg.confidence = audit_conf;
      std::optional<std::string> scenario;
      if (sc_opt->count() > 0) scenario = audit_scenario;
      const std::string family = fam_opt->count() > 0 || !audit_family.empty()
                                     ? audit_family
                                     : std::string();
      return cmd_audit(scenario, family, audit_k, audit_f1, audit_g1, cfg);
    }
    if (app.got_subcommand("grid-eval")) {
      cfg_file.merge(grid_spec_opt, "spec", grid_spec);
      cfg_file.merge(grid_out_opt, "out_dir", grid_out);
      cfg_file.merge(grid_units_opt, "units", grid_units);
      cfg_file.merge(grid_bins_opt, "bins", grid_bins);
      cfg_file.merge(grid_days_opt, "min_days", grid_min_days);
      return cmd_grid_eval(grid_models, grid_ref1, grid_ref2, grid_spec,
                           grid_out, grid_units, grid_bins, grid_min_days);
    }
    return cmd_catalogue();
  } catch (const NoCommonCells& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const SingularCovariance& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
