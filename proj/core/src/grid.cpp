#include "properdiv/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "properdiv/errors.hpp"
#include "properdiv/measures.hpp"
#include "properdiv/parallel.hpp"

namespace properdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double_field(const std::string& s, std::size_t row,
                          const char* what) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
    throw ParseError(std::string("expected finite number for ") + what +
                         ", got '" + s + "'",
                     row);
  }
  return v;
}

int parse_int_field(const std::string& s, std::size_t row, const char* what) {
  int v = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ParseError(
        std::string("expected integer for ") + what + ", got '" + s + "'",
        row);
  }
  return v;
}

std::string path_stem(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return name;
}

void flag_year_mismatches(GridDataset& ds) {
  // majority year set wins; deviating cells are flagged but kept
  std::map<std::string, std::size_t> key_counts;
  auto year_key = [](const CellSeries& cell) {
    std::string key;
    for (const auto& [year, value] : cell.values) {
      key += std::to_string(year);
      key += ';';
    }
    return key;
  };
  for (const auto& [id, cell] : ds.cells) ++key_counts[year_key(cell)];
  std::string majority;
  std::size_t best = 0;
  for (const auto& [key, count] : key_counts) {
    if (count > best) {
      best = count;
      majority = key;
    }
  }
  for (auto& [id, cell] : ds.cells) {
    cell.year_mismatch = year_key(cell) != majority;
  }
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

GridDataset parse_grid_dataset(const std::string& text,
                               std::string dataset_id,
                               const LoadOptions& opts) {
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;

  if (!std::getline(in, line)) throw EmptyDataset("empty file");
  ++row;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool daily;
  if (line == "cell_id,lat,lon,year,value") {
    daily = false;
  } else if (line == "cell_id,lat,lon,date,value") {
    daily = true;
  } else {
    throw ParseError("unrecognized header '" + line + "'", row);
  }

  GridDataset ds;
  ds.dataset_id = std::move(dataset_id);
  struct DailyCell {
    std::vector<std::pair<Date, double>> series;
  };
  std::map<std::string, DailyCell> daily_cells;
  std::size_t data_rows = 0;

  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 5) throw ParseError("expected 5 fields", row);
    const std::string& cell_id = f[0];
    if (cell_id.empty()) throw ParseError("empty cell_id", row);
    const double lat = parse_double_field(f[1], row, "lat");
    const double lon = parse_double_field(f[2], row, "lon");
    const double value = parse_double_field(f[4], row, "value");

    auto& cell = ds.cells[cell_id];
    if (cell.values.empty() && (!daily || daily_cells[cell_id].series.empty())) {
      cell.lat = lat;
      cell.lon = lon;
    } else if (cell.lat != lat || cell.lon != lon) {
      throw ParseError("inconsistent lat/lon for cell '" + cell_id + "'", row);
    }

    if (daily) {
      Date date;
      try {
        date = parse_date(f[3]);
      } catch (const InvalidInput& e) {
        throw ParseError(e.what(), row);
      }
      daily_cells[cell_id].series.emplace_back(date, value);
    } else {
      const int year = parse_int_field(f[3], row, "year");
      for (const auto& [y, v] : cell.values) {
        if (y == year) {
          throw ParseError("duplicate year " + std::to_string(year) +
                               " for cell '" + cell_id + "'",
                           row);
        }
      }
      cell.values.emplace_back(year, value);
    }
    ++data_rows;
  }

  if (data_rows == 0) throw EmptyDataset("no data rows");

  if (daily) {
    for (auto& [id, dc] : daily_cells) {
      auto& cell = ds.cells[id];
      for (const AnnualMax& am : annual_maxima(dc.series, opts.min_days)) {
        cell.values.emplace_back(am.year, am.value);
        if (am.incomplete) cell.incomplete_years.push_back(am.year);
      }
    }
  }

  for (auto& [id, cell] : ds.cells) {
    std::sort(cell.values.begin(), cell.values.end());
  }
  flag_year_mismatches(ds);
  return ds;
}

GridDataset load_grid_dataset(const std::string& path,
                              const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid_dataset(buf.str(), path_stem(path), opts);
}

namespace {

std::vector<double> cell_values(const CellSeries& cell) {
  std::vector<double> out;
  out.reserve(cell.values.size());
  for (const auto& [year, value] : cell.values) out.push_back(value);
  return out;
}

// Divergence between two per-cell yearly series per the spec's route:
// empirical CDFs, moment summaries, or binned categories.
CellValue evaluate_cell(const DivergenceSpec& spec,
                        const std::vector<double>& model_values,
                        const std::vector<double>& ref_values,
                        const GridEvalOptions& opts) {
  CellValue out;
  try {
    if (spec.categorical()) {
      if (opts.bin_edges.empty()) {
        throw InvalidInput(
            "categorical divergence on grid data requires explicit bin "
            "edges");
      }
      const CategoricalDist f = bin_to_categorical(model_values, opts.bin_edges);
      if (spec.id == DivergenceId::KLScoreForm) {
        // count-exact path for the empirical side
        const auto& edges = opts.bin_edges;
        std::vector<std::size_t> counts(edges.size() - 1, 0);
        for (double v : ref_values) {
          if (!(v >= edges.front()) || !(v <= edges.back())) {
            throw OutOfRange("value outside bin edges");
          }
          std::size_t bin = counts.size() - 1;
          if (v != edges.back()) {
            const auto it = std::upper_bound(edges.begin(), edges.end(), v);
            bin = static_cast<std::size_t>(it - edges.begin()) - 1;
          }
          ++counts[bin];
        }
        out.value = kl_score_divergence(f, counts).value;
      } else {
        const CategoricalDist g = bin_to_categorical(ref_values, opts.bin_edges);
        out.value = eval_divergence(spec, f, g, opts.data_unit).value;
      }
    } else {
      const PiecewiseLinearCdf f = EmpiricalMeasure(model_values).as_cdf();
      const PiecewiseLinearCdf g = EmpiricalMeasure(ref_values).as_cdf();
      out.value = eval_divergence(spec, f, g, opts.data_unit).value;
    }
  } catch (const OutOfRange&) {
    out.skipped = true;
    out.skip_reason = "out_of_range";
  } catch (const SingularCovariance&) {
    out.skipped = true;
    out.skip_reason = "singular_covariance";
  }
  return out;
}

}  // namespace

DivergenceMap per_cell_divergence(const GridDataset& model,
                                  const GridDataset& reference,
                                  const DivergenceSpec& spec,
                                  const GridEvalOptions& opts) {
  DivergenceMap map;
  map.spec = spec;
  map.units = units_string(spec, opts.data_unit);
  map.model_id = model.dataset_id;
  map.reference_id = reference.dataset_id;

  struct Job {
    std::string cell_id;
    const CellSeries* model_cell;
    const CellSeries* ref_cell;
  };
  std::vector<Job> jobs;
  std::size_t common = 0;
  for (const auto& [id, cell] : model.cells) {
    const auto it = reference.cells.find(id);
    const CellSeries* ref_cell = it == reference.cells.end() ? nullptr : &it->second;
    if (ref_cell) ++common;
    jobs.push_back({id, &cell, ref_cell});
  }
  for (const auto& [id, cell] : reference.cells) {
    if (model.cells.find(id) == model.cells.end()) {
      jobs.push_back({id, nullptr, &cell});
    }
  }
  if (common == 0) {
    throw NoCommonCells("no common cells between '" + model.dataset_id +
                        "' and '" + reference.dataset_id + "'");
  }

  std::vector<CellValue> results(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t i) {
        const Job& job = jobs[i];
        CellValue cv;
        if (!job.model_cell || !job.ref_cell) {
          cv.skipped = true;
          cv.skip_reason = "missing";
          const CellSeries* present = job.model_cell ? job.model_cell : job.ref_cell;
          cv.lat = present->lat;
          cv.lon = present->lon;
        } else {
          cv = evaluate_cell(spec, cell_values(*job.model_cell),
                             cell_values(*job.ref_cell), opts);
          cv.lat = job.model_cell->lat;
          cv.lon = job.model_cell->lon;
        }
        results[i] = std::move(cv);
      },
      opts.max_threads);

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    map.cells.emplace(jobs[i].cell_id, std::move(results[i]));
  }
  return map;
}

SpatialAverage spatial_average(const DivergenceMap& map) {
  double sum = 0.0;
  std::size_t n = 0;
  bool infinite = false;
  for (const auto& [id, cv] : map.cells) {
    if (cv.skipped) continue;
    ++n;
    if (std::isinf(cv.value)) infinite = true;
    sum += cv.value;
  }
  if (n == 0) throw InvalidInput("spatial average: all cells skipped");
  return {infinite ? kInf : sum / static_cast<double>(n), n};
}

SpatialAverage internal_variability_baseline(const GridDataset& ref1,
                                             const GridDataset& ref2,
                                             const DivergenceSpec& spec,
                                             const GridEvalOptions& opts) {
  return spatial_average(per_cell_divergence(ref1, ref2, spec, opts));
}

RankingTable rank_models(const std::vector<GridDataset>& models,
                         const GridDataset& ref1, const GridDataset& ref2,
                         const DivergenceSpec& spec,
                         const GridEvalOptions& opts) {
  if (models.empty()) throw InvalidInput("ranking: need at least one model");
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = i + 1; j < models.size(); ++j) {
      if (models[i].dataset_id == models[j].dataset_id) {
        throw InvalidInput("ranking: duplicate model id '" +
                           models[i].dataset_id + "'");
      }
    }
  }

  RankingTable table;
  table.spec = spec;
  table.units = units_string(spec, opts.data_unit);
  table.ref1_id = ref1.dataset_id;
  table.ref2_id = ref2.dataset_id;
  table.propriety_warning = spec.propriety() == Propriety::ImproperVariant;

  for (const GridDataset& model : models) {
    const SpatialAverage a1 =
        spatial_average(per_cell_divergence(model, ref1, spec, opts));
    const SpatialAverage a2 =
        spatial_average(per_cell_divergence(model, ref2, spec, opts));
    table.rows.push_back({model.dataset_id, a1.value, a2.value, 0, 0,
                          std::min(a1.n_cells_used, a2.n_cells_used)});
  }

  auto assign_ranks = [&](auto key, auto set_rank) {
    std::vector<std::size_t> order(table.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = key(table.rows[a]), vb = key(table.rows[b]);
      if (va != vb) return va < vb;
      return table.rows[a].model_id < table.rows[b].model_id;
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      set_rank(table.rows[order[pos]], static_cast<int>(pos) + 1);
    }
  };
  assign_ranks([](const RankingRow& r) { return r.avg_ref1; },
               [](RankingRow& r, int rank) { r.rank_ref1 = rank; });
  assign_ranks([](const RankingRow& r) { return r.avg_ref2; },
               [](RankingRow& r, int rank) { r.rank_ref2 = rank; });

  std::sort(table.rows.begin(), table.rows.end(),
            [](const RankingRow& a, const RankingRow& b) {
              return a.rank_ref1 < b.rank_ref1;
            });

  const SpatialAverage baseline =
      internal_variability_baseline(ref1, ref2, spec, opts);
  table.baseline = baseline.value;
  table.baseline_n_cells = baseline.n_cells_used;
  return table;
}

std::string divergence_map_csv(const DivergenceMap& map) {
  std::string out = "cell_id,lat,lon,value,status\n";
  for (const auto& [id, cv] : map.cells) {
    out += id;
    out += ',';
    out += format_double(cv.lat);
    out += ',';
    out += format_double(cv.lon);
    out += ',';
    if (!cv.skipped) out += format_double(cv.value);
    out += ',';
    out += cv.skipped ? cv.skip_reason : "ok";
    out += '\n';
  }
  return out;
}

std::string ranking_csv(const RankingTable& table) {
  std::string out =
      "model_id,avg_ref1,avg_ref2,rank_ref1,rank_ref2,n_cells_used,"
      "propriety_warning\n";
  const std::string warn = table.propriety_warning ? "true" : "false";
  for (const RankingRow& r : table.rows) {
    out += r.model_id;
    out += ',';
    out += format_double(r.avg_ref1);
    out += ',';
    out += format_double(r.avg_ref2);
    out += ',';
    out += std::to_string(r.rank_ref1);
    out += ',';
    out += std::to_string(r.rank_ref2);
    out += ',';
    out += std::to_string(r.n_cells_used);
    out += ',';
    out += warn;
    out += '\n';
  }
  // the internal-variability reference line, rank fields 0 by convention
  out += "__internal_variability__,";
  out += format_double(table.baseline);
  out += ',';
  out += format_double(table.baseline);
  out += ",0,0,";
  out += std::to_string(table.baseline_n_cells);
  out += ',';
  out += warn;
  out += '\n';
  return out;
}

std::string scatter_json(const RankingTable& table) {
  nlohmann::json points = nlohmann::json::array();
  std::vector<const RankingRow*> rows;
  for (const RankingRow& r : table.rows) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(),
            [](const RankingRow* a, const RankingRow* b) {
              return a->model_id < b->model_id;
            });
  for (const RankingRow* r : rows) {
    points.push_back({{"model_id", r->model_id},
                      {"x", r->avg_ref1},
                      {"y", r->avg_ref2}});
  }
  nlohmann::json j{{"divergence", nlohmann::json::parse(table.spec.to_json())},
                   {"units", table.units},
                   {"x_reference", table.ref1_id},
                   {"y_reference", table.ref2_id},
                   {"baseline", table.baseline},
                   {"propriety_warning", table.propriety_warning},
                   {"points", points}};
  return j.dump(2) + "\n";
}

}  // namespace properdiv
