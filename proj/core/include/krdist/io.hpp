#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "krdist/discrete_measure.hpp"
#include "krdist/krd.hpp"
#include "krdist/metric_space.hpp"
#include "krdist/stpp.hpp"

namespace krdist {

// Either one point per line (whitespace-separated coordinates) or a
// "DMAT n" header followed by n rows of distances.
PointSet read_point_set(std::istream& in);
PointSet load_point_set(const std::string& path);
void write_point_set(std::ostream& out, const PointSet& space);

// "MEASURE n_points" header followed by "index weight" lines.
DiscreteMeasure read_measure(std::istream& in, std::shared_ptr<const PointSet> space);
DiscreteMeasure load_measure(const std::string& path, std::shared_ptr<const PointSet> space);
void write_measure(std::ostream& out, const DiscreteMeasure& mu);

// "src dst mass" lines followed by a trailer of "# key value" lines.
void write_plan(std::ostream& out, const UnbalancedPlan& plan);

// "STPP T n" header followed by "x_1 ... x_d t" lines.
void write_pattern(std::ostream& out, const Pattern& pattern);
Pattern read_pattern(std::istream& in);

}  // namespace krdist
