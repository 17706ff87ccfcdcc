#include <gtest/gtest.h>

#include <sstream>

#include "krdist/io.hpp"
#include "krdist/process_config.hpp"

using namespace krdist;

TEST(Io, PointSetFormats) {
  std::istringstream pts("0 0\n3 4\n\n1 1\n");
  PointSet s = read_point_set(pts);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.dim(), 2u);
  EXPECT_DOUBLE_EQ(s.distance(0, 1), 5.0);

  std::istringstream dm("DMAT 3\n0 1 2\n1 0 1\n2 1 0\n");
  PointSet m = read_point_set(dm);
  EXPECT_FALSE(m.has_coordinates());
  EXPECT_DOUBLE_EQ(m.distance(0, 2), 2.0);

  std::ostringstream out;
  write_point_set(out, m);
  std::istringstream back(out.str());
  PointSet m2 = read_point_set(back);
  EXPECT_DOUBLE_EQ(m2.distance(1, 2), 1.0);

  std::istringstream ragged("0 0\n1\n");
  EXPECT_THROW(read_point_set(ragged), std::runtime_error);
}

TEST(Io, MeasureRoundTrip) {
  auto s = std::make_shared<const PointSet>(PointSet::from_coordinates(1, {0, 1, 2}));
  std::istringstream in("MEASURE 3\n2 0.5\n0 0.25\n");
  DiscreteMeasure mu = read_measure(in, s);
  EXPECT_DOUBLE_EQ(mu.total_mass(), 0.75);
  std::ostringstream out;
  write_measure(out, mu);
  std::istringstream back(out.str());
  EXPECT_EQ(read_measure(back, s).dense(), mu.dense());

  std::istringstream wrong("MEASURE 4\n0 1\n");
  EXPECT_THROW(read_measure(wrong, s), std::runtime_error);
  std::istringstream noheader("0 1\n");
  EXPECT_THROW(read_measure(noheader, s), std::runtime_error);
}

TEST(Io, PatternRoundTripIsExact) {
  Pattern p;
  p.dim = 2;
  p.T = 3.5;
  p.coords = {0.1, 0.2, 1.0 / 3.0, 0.7};
  p.times = {0.25, 2.0 / 3.0};
  std::ostringstream out;
  write_pattern(out, p);
  std::istringstream in(out.str());
  Pattern q = read_pattern(in);
  EXPECT_EQ(q.dim, 2u);
  EXPECT_EQ(q.T, p.T);
  EXPECT_EQ(q.coords, p.coords);
  EXPECT_EQ(q.times, p.times);
}

TEST(Config, ParsesProcessesAndRejectsUnknownKeys) {
  std::istringstream in(
      "[process]\nkind = poisson\ndim = 2\nmass = 3\n"
      "[law]\nkind = gaussian_mixture\ndim = 2\ncomponents = 0.5 0.2 0.2 0.1; 0.5 0.8 0.8 0.1\n");
  KvDocument doc = KvDocument::parse(in);
  ProcessSpec spec = parse_process(doc);
  doc.finish();
  ASSERT_TRUE(std::holds_alternative<PoissonSpec>(spec));
  EXPECT_EQ(std::get<PoissonSpec>(spec).mass, 3.0);
  EXPECT_EQ(std::get<PoissonSpec>(spec).law.components().size(), 2u);

  std::istringstream typo("[process]\nkind = poisson\nmas = 3\n");
  KvDocument d2 = KvDocument::parse(typo);
  parse_process(d2);
  EXPECT_THROW(d2.finish(), std::invalid_argument);

  std::istringstream extra("[process]\nkind = poisson\n[bogus]\nx = 1\n");
  KvDocument d3 = KvDocument::parse(extra);
  parse_process(d3);
  EXPECT_THROW(d3.finish(), std::invalid_argument);

  std::istringstream bad("[process]\nkind = hawkes\nalpha = 1\nbeta = 1\n");
  KvDocument d4 = KvDocument::parse(bad);
  EXPECT_THROW(parse_process(d4), std::invalid_argument);

  std::istringstream pareto("[process]\nkind = renewal_pareto\ngamma = 2.5\n");
  KvDocument d5 = KvDocument::parse(pareto);
  EXPECT_THROW(parse_process(d5), std::invalid_argument);
}

TEST(Config, RateExperiment) {
  std::istringstream in(
      "[process]\nkind = poisson\n[experiment]\np = 2\nC = 0.5\nt_grid = geometric:8:64:4\n"
      "replicates = 40\nseed = 9\nalpha = 1\n");
  KvDocument doc = KvDocument::parse(in);
  RateExperimentConfig c = parse_rate_config(doc);
  doc.finish();
  EXPECT_EQ(c.params.p, 2.0);
  EXPECT_EQ(c.params.C, 0.5);
  EXPECT_EQ(c.t_grid, (std::vector<double>{8, 16, 32, 64}));
  EXPECT_EQ(c.replicates, 40u);
  EXPECT_EQ(c.seed, 9u);
  ASSERT_TRUE(c.alpha_override.has_value());
  EXPECT_FALSE(c.beta_override.has_value());

  EXPECT_EQ(parse_t_grid("1, 2.5,4"), (std::vector<double>{1, 2.5, 4}));
  EXPECT_THROW(parse_t_grid("2,1"), std::invalid_argument);
  EXPECT_THROW(parse_t_grid("geometric:1:8"), std::invalid_argument);

  std::istringstream few("[process]\nkind = poisson\n[experiment]\nt_grid = 1,2\nreplicates = 5\n");
  KvDocument d2 = KvDocument::parse(few);
  EXPECT_THROW(parse_rate_config(d2), std::invalid_argument);
}
