#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pslmorl {

// Maximization throughout: larger objective values are better.
enum class Dominance { Strict, Weak, None };

// Weak: a >= b componentwise. Strict: weak plus a strict improvement
// somewhere. None otherwise.
Dominance dominates(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct ObjectivePoint {
    Eigen::VectorXd values;
    Eigen::VectorXd preference;  // provenance; may be empty
    long checkpoint_step = -1;   // provenance; -1 when unknown
};

// Nondominated subset: strictly dominated points removed, duplicate value
// vectors collapsed to one (first occurrence kept).
std::vector<ObjectivePoint> pareto_filter(const std::vector<ObjectivePoint>& points);
std::vector<Eigen::VectorXd> pareto_filter(const std::vector<Eigen::VectorXd>& points);

// Mutable nondominated set. Insertion keeps the archive equal to
// pareto_filter over everything ever inserted.
class ParetoArchive {
public:
    // Returns true if the point was added (not weakly dominated by a
    // resident); evicts residents the new point strictly dominates.
    bool insert(ObjectivePoint p);

    const std::vector<ObjectivePoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

private:
    std::vector<ObjectivePoint> points_;
};

// Exact hypervolume of the region dominated by `points` and bounded below by
// `ref`. Coordinates at or below the reference contribute nothing. Exact
// sweep for m == 2; recursive slicing for 3 <= m <= 8.
double hypervolume(const std::vector<Eigen::VectorXd>& points,
                   const Eigen::VectorXd& ref);

// The two algorithms behind `hypervolume`, callable directly so they can be
// cross-checked against each other. The sweep requires m == 2; the recursive
// slicer accepts 2 <= m <= 8 (at m == 2 it does not delegate to the sweep).
double hypervolume_sweep_2d(const std::vector<Eigen::VectorXd>& points,
                            const Eigen::VectorXd& ref);
double hypervolume_recursive(const std::vector<Eigen::VectorXd>& points,
                             const Eigen::VectorXd& ref);

// Mean squared gap between consecutive per-objective-sorted values
// (descending). Empty optional when the front has a single point.
std::optional<double> sparsity(const std::vector<Eigen::VectorXd>& points);

double hypervolume(const std::vector<ObjectivePoint>& points, const Eigen::VectorXd& ref);
std::optional<double> sparsity(const std::vector<ObjectivePoint>& points);

// Front CSV: header "obj_1,...,obj_m,pref_1,...,pref_m", one row per point.
// Doubles are written shortest-round-trip so re-reading is lossless.
void write_front_csv(std::ostream& os, const std::vector<ObjectivePoint>& points, int m);
void write_front_csv(const std::string& path, const std::vector<ObjectivePoint>& points,
                     int m);
std::vector<ObjectivePoint> read_front_csv(const std::string& path);

}  // namespace pslmorl
