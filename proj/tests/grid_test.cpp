#include "properdiv/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include <gtest/gtest.h>

#include "properdiv/errors.hpp"

namespace properdiv {
namespace {

DivergenceSpec spec_of(DivergenceId id) {
  DivergenceSpec spec;
  spec.id = id;
  return spec;
}

// cells x years fixture, value = base(cell) + year_index + shift
std::string yearly_csv(int n_cells, int n_years, double shift = 0.0,
                       double cell_step = 10.0) {
  std::ostringstream out;
  out << "cell_id,lat,lon,year,value\n";
  for (int c = 0; c < n_cells; ++c) {
    for (int y = 0; y < n_years; ++y) {
      out << "r0c" << c << "," << (40.0 + c) << "," << (8.0 + c) << ","
          << (1961 + y) << "," << (cell_step * c + 2.0 * y + shift) << "\n";
    }
  }
  return out.str();
}

TEST(LoadGridDataset, ParsesYearlyRoundTrip) {
  const GridDataset ds = parse_grid_dataset(yearly_csv(2, 3), "fixture");
  EXPECT_EQ(ds.dataset_id, "fixture");
  ASSERT_EQ(ds.cells.size(), 2u);
  const CellSeries& cell = ds.cells.at("r0c1");
  EXPECT_DOUBLE_EQ(cell.lat, 41.0);
  EXPECT_DOUBLE_EQ(cell.lon, 9.0);
  ASSERT_EQ(cell.values.size(), 3u);
  EXPECT_EQ(cell.values[0], (std::pair<int, double>{1961, 10.0}));
  EXPECT_EQ(cell.values[2], (std::pair<int, double>{1963, 14.0}));
  EXPECT_FALSE(cell.year_mismatch);
}

TEST(LoadGridDataset, HeaderOnlyIsEmptyDataset) {
  EXPECT_THROW(parse_grid_dataset("cell_id,lat,lon,year,value\n", "x"),
               EmptyDataset);
  EXPECT_THROW(parse_grid_dataset("", "x"), EmptyDataset);
}

TEST(LoadGridDataset, MismatchedYearSetsAreFlaggedNotFatal) {
  std::string text = yearly_csv(3, 3);
  text += "r0c9,49.0,17.0,1999,3.5\n";  // lone cell with a different year set
  const GridDataset ds = parse_grid_dataset(text, "x");
  ASSERT_EQ(ds.cells.size(), 4u);
  EXPECT_TRUE(ds.cells.at("r0c9").year_mismatch);
  EXPECT_FALSE(ds.cells.at("r0c0").year_mismatch);
}

TEST(LoadGridDataset, ParseErrorsCarryRowNumbers) {
  try {
    parse_grid_dataset("cell_id,lat,lon,year,value\na,1,2,1961\n", "x");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
  }
  EXPECT_THROW(parse_grid_dataset("bad,header\n", "x"), ParseError);
  EXPECT_THROW(
      parse_grid_dataset("cell_id,lat,lon,year,value\na,1,2,1961,inf\n", "x"),
      ParseError);
  EXPECT_THROW(
      parse_grid_dataset("cell_id,lat,lon,year,value\na,1,2,1961,nan\n", "x"),
      ParseError);
  EXPECT_THROW(parse_grid_dataset(
                   "cell_id,lat,lon,year,value\na,1,2,1961,5\na,1,2,1961,6\n",
                   "x"),
               ParseError);  // duplicate year
  EXPECT_THROW(parse_grid_dataset(
                   "cell_id,lat,lon,year,value\na,1,2,1961,5\na,9,2,1962,6\n",
                   "x"),
               ParseError);  // inconsistent lat
}

TEST(LoadGridDataset, DailyVariantRoutesThroughAnnualMaxima) {
  std::ostringstream text;
  text << "cell_id,lat,lon,date,value\n";
  text << "a,40,8,1961-01-01,3\n";
  text << "a,40,8,1961-07-01,25\n";
  text << "a,40,8,1962-07-01,24\n";
  LoadOptions opts;
  opts.min_days = 2;
  const GridDataset ds = parse_grid_dataset(text.str(), "daily", opts);
  const CellSeries& cell = ds.cells.at("a");
  ASSERT_EQ(cell.values.size(), 2u);
  EXPECT_EQ(cell.values[0], (std::pair<int, double>{1961, 25.0}));
  EXPECT_EQ(cell.values[1], (std::pair<int, double>{1962, 24.0}));
  // 1962 has a single entry -> incomplete under min_days = 2
  EXPECT_EQ(cell.incomplete_years, (std::vector<int>{1962}));
}

TEST(PerCellDivergence, IdenticalDatasetsGiveZeroForEverySpec) {
  const GridDataset ds = parse_grid_dataset(yearly_csv(3, 5), "m");
  GridEvalOptions opts;
  opts.bin_edges = {-100.0, 0.0, 100.0};
  for (DivergenceSpec spec : divergence_catalogue()) {
    if (spec.id == DivergenceId::Mahalanobis) {
      spec.sigma = Eigen::MatrixXd::Constant(1, 1, 2.0);
    }
    if (spec.id == DivergenceId::WIQ) {
      spec.weight = WeightFunction({-100.0, 100.0}, {1.0});
    }
    const DivergenceMap map = per_cell_divergence(ds, ds, spec, opts);
    for (const auto& [id, cv] : map.cells) {
      ASSERT_FALSE(cv.skipped) << to_string(spec.id);
      EXPECT_EQ(cv.value, 0.0) << to_string(spec.id);
    }
  }
}

// Single-year cells: a 1 degree shift reduces to point masses, so IQ gives
// exactly the shift and MV its square. Verified against the brute-force
// energy form.
TEST(PerCellDivergence, UnitShiftOnSingleYearCells) {
  const GridDataset ref = parse_grid_dataset(yearly_csv(4, 1), "ref");
  const GridDataset model = parse_grid_dataset(yearly_csv(4, 1, 1.0), "model");

  const DivergenceMap iq =
      per_cell_divergence(model, ref, spec_of(DivergenceId::IQ));
  for (const auto& [id, cv] : iq.cells) {
    ASSERT_FALSE(cv.skipped);
    EXPECT_NEAR(cv.value, 1.0, 1e-12);
  }
  // brute-force energy form for point masses x, y: |x - y| - 0 - 0
  EXPECT_NEAR(std::abs((0.0 + 1.0) - 0.0), 1.0, 1e-15);

  const DivergenceMap mv =
      per_cell_divergence(model, ref, spec_of(DivergenceId::MV));
  for (const auto& [id, cv] : mv.cells) {
    EXPECT_NEAR(cv.value, 1.0, 1e-12);
  }
}

TEST(PerCellDivergence, MultiYearShiftIsShiftOverK) {
  const int years = 5;
  const GridDataset ref = parse_grid_dataset(yearly_csv(2, years), "ref");
  const GridDataset model =
      parse_grid_dataset(yearly_csv(2, years, 1.0), "model");
  const DivergenceMap iq =
      per_cell_divergence(model, ref, spec_of(DivergenceId::IQ));
  for (const auto& [id, cv] : iq.cells) {
    EXPECT_NEAR(cv.value, 1.0 / years, 1e-12);  // atoms 2 apart, shift 1
  }
  const DivergenceMap mv =
      per_cell_divergence(model, ref, spec_of(DivergenceId::MV));
  for (const auto& [id, cv] : mv.cells) {
    EXPECT_NEAR(cv.value, 1.0, 1e-12);
  }
}

TEST(PerCellDivergence, MissingCellsAreSkippedNotFatal) {
  const GridDataset a = parse_grid_dataset(yearly_csv(3, 2), "a");
  std::string text = yearly_csv(2, 2);
  text += "extra,50,20,1961,1\nextra,50,20,1962,2\n";
  const GridDataset b = parse_grid_dataset(text, "b");
  const DivergenceMap map =
      per_cell_divergence(a, b, spec_of(DivergenceId::AV));
  EXPECT_EQ(map.cells.size(), 4u);  // union: r0c0, r0c1, r0c2, extra
  EXPECT_FALSE(map.cells.at("r0c0").skipped);
  EXPECT_TRUE(map.cells.at("r0c2").skipped);
  EXPECT_EQ(map.cells.at("r0c2").skip_reason, "missing");
  EXPECT_TRUE(map.cells.at("extra").skipped);
}

TEST(PerCellDivergence, NoCommonCellsRaises) {
  const GridDataset a = parse_grid_dataset(
      "cell_id,lat,lon,year,value\nonly_a,1,2,1961,5\n", "a");
  const GridDataset b = parse_grid_dataset(
      "cell_id,lat,lon,year,value\nonly_b,1,2,1961,5\n", "b");
  EXPECT_THROW(per_cell_divergence(a, b, spec_of(DivergenceId::IQ)),
               NoCommonCells);
}

TEST(PerCellDivergence, CategoricalSpecsNeedExplicitBins) {
  const GridDataset ds = parse_grid_dataset(yearly_csv(2, 3), "m");
  EXPECT_THROW(per_cell_divergence(ds, ds, spec_of(DivergenceId::KLScoreForm)),
               InvalidInput);
  GridEvalOptions opts;
  opts.bin_edges = {-1000.0, 5.0, 1000.0};
  const DivergenceMap map =
      per_cell_divergence(ds, ds, spec_of(DivergenceId::KLScoreForm), opts);
  for (const auto& [id, cv] : map.cells) {
    EXPECT_EQ(cv.value, 0.0);
  }
}

TEST(PerCellDivergence, SingularCovarianceCellsAreSkipped) {
  // constant per-cell series: zero variance, DS cannot factor the forecast
  std::string text = "cell_id,lat,lon,year,value\n";
  text += "a,1,2,1961,5\na,1,2,1962,5\n";
  const GridDataset ds = parse_grid_dataset(text, "m");
  const DivergenceMap map =
      per_cell_divergence(ds, ds, spec_of(DivergenceId::DS));
  EXPECT_TRUE(map.cells.at("a").skipped);
  EXPECT_EQ(map.cells.at("a").skip_reason, "singular_covariance");
  EXPECT_THROW(spatial_average(map), InvalidInput);  // all skipped
}

TEST(SpatialAverage, ExcludesSkippedAndCountsUse) {
  DivergenceMap map;
  map.spec = spec_of(DivergenceId::IQ);
  map.cells["a"] = {0, 0, 1.0, false, ""};
  map.cells["b"] = {0, 0, 3.0, false, ""};
  map.cells["c"] = {0, 0, 0.0, true, "missing"};
  const SpatialAverage avg = spatial_average(map);
  EXPECT_DOUBLE_EQ(avg.value, 2.0);
  EXPECT_EQ(avg.n_cells_used, 2u);

  map.cells["b"].value = 1.0;
  EXPECT_DOUBLE_EQ(spatial_average(map).value, 1.0);  // uniform value

  map.cells["b"].value = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(std::isinf(spatial_average(map).value));
}

TEST(SpatialAverage, InvariantUnderCellRelabeling) {
  const GridDataset ref = parse_grid_dataset(yearly_csv(5, 3), "ref");
  const GridDataset model = parse_grid_dataset(yearly_csv(5, 3, 0.7), "model");
  const DivergenceMap map =
      per_cell_divergence(model, ref, spec_of(DivergenceId::AV));
  DivergenceMap relabeled = map;
  relabeled.cells.clear();
  for (const auto& [id, cv] : map.cells) {
    relabeled.cells["zz_" + id] = cv;
  }
  EXPECT_EQ(spatial_average(map).value, spatial_average(relabeled).value);
}

TEST(Baseline, IdenticalReferencesGiveZero) {
  const GridDataset ref = parse_grid_dataset(yearly_csv(3, 4), "ref");
  EXPECT_EQ(
      internal_variability_baseline(ref, ref, spec_of(DivergenceId::IQ)).value,
      0.0);
}

TEST(Baseline, HandComputableNoiseFixture) {
  // single-year cells, ref2 = ref1 + alternating +/-0.5: per-cell IQ on
  // point masses is |noise| = 0.5, so the baseline is exactly 0.5
  std::string r1 = "cell_id,lat,lon,year,value\n";
  std::string r2 = "cell_id,lat,lon,year,value\n";
  for (int c = 0; c < 6; ++c) {
    const double noise = (c % 2 == 0) ? 0.5 : -0.5;
    r1 += "c" + std::to_string(c) + ",1,2,1961," + std::to_string(10.0 + c) +
          "\n";
    r2 += "c" + std::to_string(c) + ",1,2,1961," +
          std::to_string(10.0 + c + noise) + "\n";
  }
  const GridDataset ref1 = parse_grid_dataset(r1, "ref1");
  const GridDataset ref2 = parse_grid_dataset(r2, "ref2");
  const SpatialAverage base =
      internal_variability_baseline(ref1, ref2, spec_of(DivergenceId::IQ));
  EXPECT_NEAR(base.value, 0.5, 1e-12);
  EXPECT_EQ(base.n_cells_used, 6u);
}

TEST(RankModels, IdentityModelRanksFirstWithZeroAverage) {
  const GridDataset ref1 = parse_grid_dataset(yearly_csv(3, 4), "ref1");
  const GridDataset ref2 = parse_grid_dataset(yearly_csv(3, 4, 0.25), "ref2");
  const GridDataset twin = parse_grid_dataset(yearly_csv(3, 4), "twin");
  const GridDataset off = parse_grid_dataset(yearly_csv(3, 4, 2.0), "off");
  const RankingTable table =
      rank_models({off, twin}, ref1, ref2, spec_of(DivergenceId::IQ));
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.rows[0].model_id, "twin");
  EXPECT_EQ(table.rows[0].avg_ref1, 0.0);
  EXPECT_EQ(table.rows[0].rank_ref1, 1);
  EXPECT_EQ(table.rows[1].model_id, "off");
  EXPECT_EQ(table.rows[1].rank_ref1, 2);
  EXPECT_FALSE(table.propriety_warning);
}

TEST(RankModels, MonotoneShiftsRankInOrderUnderIqAndMv) {
  const GridDataset ref1 = parse_grid_dataset(yearly_csv(4, 6), "ref1");
  const GridDataset ref2 = parse_grid_dataset(yearly_csv(4, 6, 0.1), "ref2");
  const GridDataset m1 = parse_grid_dataset(yearly_csv(4, 6, 1.0), "shift1");
  const GridDataset m2 = parse_grid_dataset(yearly_csv(4, 6, 2.0), "shift2");
  const GridDataset m3 = parse_grid_dataset(yearly_csv(4, 6, 3.0), "shift3");
  for (DivergenceId id : {DivergenceId::IQ, DivergenceId::MV}) {
    const RankingTable table =
        rank_models({m3, m1, m2}, ref1, ref2, spec_of(id));
    ASSERT_EQ(table.rows.size(), 3u);
    EXPECT_EQ(table.rows[0].model_id, "shift1") << to_string(id);
    EXPECT_EQ(table.rows[1].model_id, "shift2") << to_string(id);
    EXPECT_EQ(table.rows[2].model_id, "shift3") << to_string(id);
    EXPECT_EQ(table.rows[0].rank_ref2, 1) << to_string(id);
    EXPECT_EQ(table.rows[2].rank_ref2, 3) << to_string(id);
  }
}

TEST(RankModels, TiesBreakLexicographically) {
  const GridDataset ref = parse_grid_dataset(yearly_csv(2, 3), "ref");
  const GridDataset b = parse_grid_dataset(yearly_csv(2, 3, 1.0), "bbb");
  const GridDataset a = parse_grid_dataset(yearly_csv(2, 3, 1.0), "aaa");
  const RankingTable table =
      rank_models({b, a}, ref, ref, spec_of(DivergenceId::IQ));
  EXPECT_EQ(table.rows[0].model_id, "aaa");
  EXPECT_EQ(table.rows[0].rank_ref1, 1);
  EXPECT_EQ(table.rows[1].model_id, "bbb");
  EXPECT_EQ(table.rows[1].rank_ref1, 2);
}

TEST(RankModels, ImproperSpecSetsWarning) {
  const GridDataset ref = parse_grid_dataset(yearly_csv(2, 5), "ref");
  const GridDataset m = parse_grid_dataset(yearly_csv(2, 5, 0.5), "m");
  const RankingTable table = rank_models(
      {m}, ref, ref, spec_of(DivergenceId::ImproperMahalanobis));
  EXPECT_TRUE(table.propriety_warning);
  const std::string csv = ranking_csv(table);
  EXPECT_NE(csv.find(",true\n"), std::string::npos);
}

TEST(Writers, MapCsvShape) {
  const GridDataset ref = parse_grid_dataset(yearly_csv(2, 1), "ref");
  const GridDataset model = parse_grid_dataset(yearly_csv(2, 1, 1.0), "m");
  const DivergenceMap map =
      per_cell_divergence(model, ref, spec_of(DivergenceId::IQ));
  const std::string csv = divergence_map_csv(map);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "cell_id,lat,lon,value,status");
  std::getline(lines, line);
  EXPECT_EQ(line, "r0c0,40,8,1,ok");
}

TEST(Writers, RankingCsvHasBaselineRow) {
  const GridDataset ref = parse_grid_dataset(yearly_csv(2, 3), "ref");
  const GridDataset m = parse_grid_dataset(yearly_csv(2, 3, 1.0), "m");
  const RankingTable table =
      rank_models({m}, ref, ref, spec_of(DivergenceId::IQ));
  const std::string csv = ranking_csv(table);
  EXPECT_EQ(csv.rfind("model_id,avg_ref1,avg_ref2,rank_ref1,rank_ref2,"
                      "n_cells_used,propriety_warning\n",
                      0),
            0u);
  EXPECT_NE(csv.find("__internal_variability__,0,0,0,0,2,false"),
            std::string::npos);
}

TEST(Writers, ScatterJsonParses) {
  const GridDataset ref = parse_grid_dataset(yearly_csv(2, 3), "ref");
  const GridDataset m = parse_grid_dataset(yearly_csv(2, 3, 1.0), "m");
  const RankingTable table =
      rank_models({m}, ref, ref, spec_of(DivergenceId::MV));
  const std::string json = scatter_json(table);
  EXPECT_NE(json.find("\"points\""), std::string::npos);
  EXPECT_NE(json.find("\"model_id\": \"m\""), std::string::npos);
  EXPECT_NE(json.find("\"baseline\""), std::string::npos);
}

TEST(Determinism, ByteIdenticalAcrossWorkerCounts) {
  const GridDataset ref1 = parse_grid_dataset(yearly_csv(20, 10), "ref1");
  const GridDataset ref2 = parse_grid_dataset(yearly_csv(20, 10, 0.3), "ref2");
  const GridDataset m = parse_grid_dataset(yearly_csv(20, 10, 1.1), "m");

  setenv("PROPERDIV_THREADS", "1", 1);
  const std::string csv1 =
      divergence_map_csv(per_cell_divergence(m, ref1, spec_of(DivergenceId::IQ)));
  const std::string rank1 =
      ranking_csv(rank_models({m}, ref1, ref2, spec_of(DivergenceId::IQ)));
  setenv("PROPERDIV_THREADS", "4", 1);
  const std::string csv4 =
      divergence_map_csv(per_cell_divergence(m, ref1, spec_of(DivergenceId::IQ)));
  const std::string rank4 =
      ranking_csv(rank_models({m}, ref1, ref2, spec_of(DivergenceId::IQ)));
  unsetenv("PROPERDIV_THREADS");
  EXPECT_EQ(csv1, csv4);
  EXPECT_EQ(rank1, rank4);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  const double v = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(v)), v);
}

}  // namespace
}  // namespace properdiv
