#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "properdiv/divergences.hpp"

namespace properdiv {

struct CellSeries {
  double lat = 0.0;
  double lon = 0.0;
  std::vector<std::pair<int, double>> values;  // (year, value), year-sorted
  /// Set when this cell's year set differs from the dataset's majority.
  bool year_mismatch = false;
  /// Years built from fewer daily entries than required (daily inputs only).
  std::vector<int> incomplete_years;
};

struct GridDataset {
  std::string dataset_id;
  std::map<std::string, CellSeries> cells;  // keyed by cell id
};

struct LoadOptions {
  /// Daily inputs: a year with fewer entries is flagged incomplete.
  int min_days = 300;
};

/// Loads the grid CSV schema `cell_id,lat,lon,year,value`, or the daily
/// variant `cell_id,lat,lon,date,value` (ISO dates), which is reduced to
/// annual maxima per cell. The variant is auto-detected from the header.
GridDataset load_grid_dataset(const std::string& path,
                              const LoadOptions& opts = {});
GridDataset parse_grid_dataset(const std::string& text,
                               std::string dataset_id,
                               const LoadOptions& opts = {});

struct CellValue {
  double lat = 0.0;
  double lon = 0.0;
  double value = 0.0;
  bool skipped = false;
  std::string skip_reason;  // "missing", "singular_covariance", ...
};

struct DivergenceMap {
  DivergenceSpec spec;
  std::string units;
  std::string model_id;
  std::string reference_id;
  /// Union of both datasets' cells; cells absent on either side or failing
  /// per-cell math are present with skipped status, so the evaluated set is
  /// the intersection.
  std::map<std::string, CellValue> cells;
};

struct GridEvalOptions {
  /// Bin edges for the categorical divergences; required for those specs.
  std::vector<double> bin_edges;
  std::string data_unit = "";
  /// 0 = use worker_count()
  std::size_t max_threads = 0;
};

/// Per common cell, the divergence between the model's and the reference's
/// empirical distribution of yearly values. Moment-based specs use the
/// per-cell moment summary (m = 1); categorical specs bin with the
/// configured edges.
DivergenceMap per_cell_divergence(const GridDataset& model,
                                  const GridDataset& reference,
                                  const DivergenceSpec& spec,
                                  const GridEvalOptions& opts = {});

struct SpatialAverage {
  double value;
  std::size_t n_cells_used;
};

/// Unweighted mean over non-skipped cells; +infinity if any cell is
/// infinite. All-skipped maps raise InvalidInput.
SpatialAverage spatial_average(const DivergenceMap& map);

/// Divergence between the two reference datasets, spatially averaged: the
/// best performance a model can reasonably be expected to reach.
SpatialAverage internal_variability_baseline(const GridDataset& ref1,
                                             const GridDataset& ref2,
                                             const DivergenceSpec& spec,
                                             const GridEvalOptions& opts = {});

struct RankingRow {
  std::string model_id;
  double avg_ref1;
  double avg_ref2;
  int rank_ref1;
  int rank_ref2;
  std::size_t n_cells_used;
};

struct RankingTable {
  DivergenceSpec spec;
  std::string units;
  std::string ref1_id;
  std::string ref2_id;
  std::vector<RankingRow> rows;  // sorted by rank_ref1
  double baseline;               // internal variability between the refs
  std::size_t baseline_n_cells;
  bool propriety_warning;  // spec is an improper variant
};

/// Spatial averages of every model against both references, ranked per
/// reference (ascending divergence, ties broken by model id). Model ids
/// must be unique.
RankingTable rank_models(const std::vector<GridDataset>& models,
                         const GridDataset& ref1, const GridDataset& ref2,
                         const DivergenceSpec& spec,
                         const GridEvalOptions& opts = {});

// Deterministic byte output: shortest round-trip number formatting, fixed
// row order.
std::string divergence_map_csv(const DivergenceMap& map);
std::string ranking_csv(const RankingTable& table);
std::string scatter_json(const RankingTable& table);

/// Shortest round-trip decimal representation of a double ("inf" for
/// infinities); the formatting used in all CSV output.
std::string format_double(double v);

}  // namespace properdiv
