#include <gtest/gtest.h>

#include "../support/generators.hpp"
#include "../support/oracles.hpp"
#include "krdist/discrete_measure.hpp"

using krdist::Atom;
using krdist::DiscreteMeasure;
using krdist::PointSet;

namespace {

std::shared_ptr<const PointSet> line(std::vector<double> xs) {
  return std::make_shared<const PointSet>(PointSet::from_coordinates(1, std::move(xs)));
}

}  // namespace

TEST(DiscreteMeasure, MassAndScale) {
  auto s = line({0, 1});
  EXPECT_EQ(DiscreteMeasure(s, {}).total_mass(), 0.0);
  DiscreteMeasure mu(s, {{1, 0.75}, {0, 0.25}});
  EXPECT_DOUBLE_EQ(mu.total_mass(), 1.0);
  EXPECT_EQ(mu.atoms()[0].index, 0u);
  EXPECT_EQ(mu.scale(0.0).support_size(), 0u);
  EXPECT_DOUBLE_EQ(mu.scale(1.0).weight_at(1), 0.75);
  EXPECT_DOUBLE_EQ(mu.scale(3.0).total_mass(), 3.0);
  EXPECT_THROW(mu.scale(-1.0), std::invalid_argument);
}

TEST(DiscreteMeasure, RejectsBadAtoms) {
  auto s = line({0, 1});
  EXPECT_THROW(DiscreteMeasure(s, {{0, 1.0}, {0, 2.0}}), std::invalid_argument);
  EXPECT_THROW(DiscreteMeasure(s, {{0, -1.0}}), std::invalid_argument);
  EXPECT_THROW(DiscreteMeasure(s, {{2, 1.0}}), std::invalid_argument);
  DiscreteMeasure z(s, {{0, 0.0}, {1, 1.0}});
  EXPECT_EQ(z.support_size(), 1u);
}

TEST(DiscreteMeasure, ProjectToCovering) {
  auto s = line({0, 0.4, 1});
  DiscreteMeasure mu = DiscreteMeasure::from_dense(s, std::vector<double>{1, 2, 3});
  std::vector<std::size_t> centers{0, 2};
  krdist::Covering cov{centers, 0.5, krdist::voronoi_partition(*s, centers)};
  DiscreteMeasure p = krdist::project_to_covering(mu, cov);
  EXPECT_EQ(p.dense(), (std::vector<double>{3, 0, 3}));

  auto single = krdist::greedy_covering(*s, 5.0);
  DiscreteMeasure q = krdist::project_to_covering(mu, single);
  EXPECT_EQ(q.support_size(), 1u);
  EXPECT_DOUBLE_EQ(q.total_mass(), 6.0);

  std::vector<std::size_t> all{0, 1, 2};
  krdist::Covering id{all, 0.1, krdist::voronoi_partition(*s, all)};
  EXPECT_EQ(krdist::project_to_covering(mu, id).dense(), mu.dense());
}

TEST(DiscreteMeasure, ProjectionPreservesMass) {
  gen::Gen g(3);
  for (int rep = 0; rep < 100; ++rep) {
    auto s = g.space(30, 2);
    DiscreteMeasure mu = g.measure(s, 30).scale(g.real(0.1, 10.0));
    auto cov = krdist::greedy_covering(*s, g.real(0.05, 0.8));
    double m0 = mu.total_mass(), m1 = krdist::project_to_covering(mu, cov).total_mass();
    EXPECT_LE(std::abs(m0 - m1), 1e-12 * m0);
  }
}

TEST(TotalVariation, Examples) {
  auto s = line({0, 1, 2, 3});
  DiscreteMeasure a = DiscreteMeasure::from_dense(s, std::vector<double>{0.7, 0.3, 0, 0});
  DiscreteMeasure b = DiscreteMeasure::from_dense(s, std::vector<double>{0.4, 0.6, 0, 0});
  EXPECT_DOUBLE_EQ(krdist::tv_distance(a, a), 0.0);
  EXPECT_NEAR(krdist::tv_distance(a, b), 0.3, 1e-15);
  EXPECT_NEAR(oracle::tv_by_subsets({0.7, 0.3}, {0.4, 0.6}), 0.3, 1e-15);
  DiscreteMeasure c(s, {{2, 1.0}}), d(s, {{3, 2.0}});
  EXPECT_DOUBLE_EQ(krdist::tv_distance(c, d), 2.0);
  EXPECT_DOUBLE_EQ(krdist::tv_norm(c, d), 3.0);

  auto other = line({0, 1, 2, 3});
  EXPECT_THROW(krdist::tv_distance(a, DiscreteMeasure(other, {{0, 1.0}})), std::invalid_argument);
}

TEST(TotalVariation, MatchesSubsetEnumerationAndIsAMetric) {
  gen::Gen g(17);
  for (int rep = 0; rep < 200; ++rep) {
    auto s = g.space(g.index(1, 10), 1);
    DiscreteMeasure a = g.measure(s, 10), b = g.measure(s, 10), c = g.measure(s, 10);
    double tv = krdist::tv_distance(a, b);
    EXPECT_NEAR(tv, oracle::tv_by_subsets(a.dense(), b.dense()), 1e-12);
    EXPECT_EQ(tv, krdist::tv_distance(b, a));
    EXPECT_LE(krdist::tv_distance(a, c), tv + krdist::tv_distance(b, c) + 1e-12);
  }
}
