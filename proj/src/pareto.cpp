#include "pslmorl/pareto.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pslmorl {

Dominance dominates(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dominance comparison dimension mismatch");
    }
    bool any_strict = false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return Dominance::None;
        if (a[i] > b[i]) any_strict = true;
    }
    return any_strict ? Dominance::Strict : Dominance::Weak;
}

namespace {

bool same_values(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() && a == b;
}

}  // namespace

std::vector<ObjectivePoint> pareto_filter(const std::vector<ObjectivePoint>& points) {
    std::vector<ObjectivePoint> front;
    for (const auto& p : points) {
        bool keep = true;
        for (const auto& q : points) {
            if (&q == &p) continue;
            if (dominates(q.values, p.values) == Dominance::Strict) {
                keep = false;
                break;
            }
        }
        if (!keep) continue;
        bool duplicate = false;
        for (const auto& f : front) {
            if (same_values(f.values, p.values)) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) front.push_back(p);
    }
    return front;
}

std::vector<Eigen::VectorXd> pareto_filter(const std::vector<Eigen::VectorXd>& points) {
    std::vector<ObjectivePoint> wrapped;
    wrapped.reserve(points.size());
    for (const auto& v : points) wrapped.push_back({v, {}, -1});
    std::vector<Eigen::VectorXd> out;
    for (auto& p : pareto_filter(wrapped)) out.push_back(std::move(p.values));
    return out;
}

bool ParetoArchive::insert(ObjectivePoint p) {
    for (const auto& q : points_) {
        if (dominates(q.values, p.values) != Dominance::None) {
            return false;  // weakly dominated (covers exact duplicates)
        }
    }
    std::erase_if(points_, [&](const ObjectivePoint& q) {
        return dominates(p.values, q.values) == Dominance::Strict;
    });
    points_.push_back(std::move(p));
    return true;
}

namespace {

double hv2d(std::vector<Eigen::VectorXd> pts, const Eigen::VectorXd& ref) {
    std::erase_if(pts, [&](const Eigen::VectorXd& p) {
        return p[0] <= ref[0] || p[1] <= ref[1];
    });
    std::sort(pts.begin(), pts.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        if (a[0] != b[0]) return a[0] > b[0];
        return a[1] > b[1];
    });
    double hv = 0.0;
    double y_max = ref[1];
    for (const auto& p : pts) {
        if (p[1] > y_max) {
            hv += (p[0] - ref[0]) * (p[1] - y_max);
            y_max = p[1];
        }
    }
    return hv;
}

double inclusive_hv(const Eigen::VectorXd& p, const Eigen::VectorXd& ref) {
    double v = 1.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) v *= p[i] - ref[i];
    return v;
}

double hv_recursive(std::vector<Eigen::VectorXd> pts, const Eigen::VectorXd& ref);

// Exclusive contribution of pts[k] with respect to the points after it.
double exclusive_hv(const std::vector<Eigen::VectorXd>& pts, std::size_t k,
                    const Eigen::VectorXd& ref) {
    const Eigen::VectorXd& p = pts[k];
    std::vector<Eigen::VectorXd> limited;
    limited.reserve(pts.size() - k - 1);
    for (std::size_t i = k + 1; i < pts.size(); ++i) {
        limited.push_back(pts[i].cwiseMin(p));
    }
    return inclusive_hv(p, ref) - hv_recursive(std::move(limited), ref);
}

double hv_recursive(std::vector<Eigen::VectorXd> pts, const Eigen::VectorXd& ref) {
    std::erase_if(pts, [&](const Eigen::VectorXd& p) {
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            if (p[i] <= ref[i]) return true;
        }
        return false;
    });
    if (pts.empty()) return 0.0;
    pts = pareto_filter(pts);
    // Processing points in decreasing first-objective order keeps the limited
    // sets small.
    std::sort(pts.begin(), pts.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return a[0] > b[0];
    });
    double hv = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        hv += exclusive_hv(pts, k, ref);
    }
    return hv;
}

void check_hv_inputs(const std::vector<Eigen::VectorXd>& points, const Eigen::VectorXd& ref) {
    if (ref.size() < 2) throw std::invalid_argument("hypervolume needs m >= 2");
    if (ref.size() > 8) throw std::invalid_argument("hypervolume supports m <= 8");
    for (const auto& p : points) {
        if (p.size() != ref.size()) {
            throw std::invalid_argument("point/reference dimension mismatch");
        }
        if (!p.allFinite()) throw std::invalid_argument("non-finite objective point");
    }
}

}  // namespace

double hypervolume_sweep_2d(const std::vector<Eigen::VectorXd>& points,
                            const Eigen::VectorXd& ref) {
    check_hv_inputs(points, ref);
    if (ref.size() != 2) throw std::invalid_argument("2-d sweep needs m == 2");
    return hv2d(points, ref);
}

double hypervolume_recursive(const std::vector<Eigen::VectorXd>& points,
                             const Eigen::VectorXd& ref) {
    check_hv_inputs(points, ref);
    return hv_recursive(points, ref);
}

double hypervolume(const std::vector<Eigen::VectorXd>& points, const Eigen::VectorXd& ref) {
    check_hv_inputs(points, ref);
    if (ref.size() == 2) return hv2d(points, ref);
    return hv_recursive(points, ref);
}

std::optional<double> sparsity(const std::vector<Eigen::VectorXd>& points) {
    if (points.empty()) throw std::invalid_argument("sparsity of an empty front");
    const std::size_t M = points.size();
    if (M == 1) return std::nullopt;
    const Eigen::Index m = points[0].size();
    double total = 0.0;
    std::vector<double> column(M);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < M; ++j) column[j] = points[j][k];
        std::sort(column.begin(), column.end(), std::greater<>());
        for (std::size_t j = 0; j + 1 < M; ++j) {
            const double gap = column[j] - column[j + 1];
            total += gap * gap;
        }
    }
    return total / static_cast<double>(M - 1);
}

namespace {

std::vector<Eigen::VectorXd> values_of(const std::vector<ObjectivePoint>& points) {
    std::vector<Eigen::VectorXd> vals;
    vals.reserve(points.size());
    for (const auto& p : points) vals.push_back(p.values);
    return vals;
}

}  // namespace

double hypervolume(const std::vector<ObjectivePoint>& points, const Eigen::VectorXd& ref) {
    return hypervolume(values_of(points), ref);
}

std::optional<double> sparsity(const std::vector<ObjectivePoint>& points) {
    return sparsity(values_of(points));
}

namespace {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_front_csv(std::ostream& os, const std::vector<ObjectivePoint>& points, int m) {
    for (int i = 0; i < m; ++i) os << "obj_" << (i + 1) << ',';
    for (int i = 0; i < m; ++i) os << "pref_" << (i + 1) << (i + 1 < m ? "," : "");
    os << '\n';
    for (const auto& p : points) {
        if (p.values.size() != m) {
            throw std::invalid_argument("front point dimension mismatch");
        }
        for (int i = 0; i < m; ++i) os << format_double(p.values[i]) << ',';
        for (int i = 0; i < m; ++i) {
            os << (p.preference.size() == m ? format_double(p.preference[i]) : "0");
            if (i + 1 < m) os << ',';
        }
        os << '\n';
    }
}

void write_front_csv(const std::string& path, const std::vector<ObjectivePoint>& points,
                     int m) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_front_csv(os, points, m);
}

std::vector<ObjectivePoint> read_front_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error(path + ": empty file");
    int m = 0;
    {
        std::stringstream ss(header);
        std::string col;
        int total = 0;
        while (std::getline(ss, col, ',')) ++total;
        if (total < 2 || total % 2 != 0) {
            throw std::runtime_error(path + ": malformed front CSV header");
        }
        m = total / 2;
    }
    std::vector<ObjectivePoint> points;
    std::string line;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": cannot parse '" + cell + "'");
            }
        }
        if (static_cast<int>(row.size()) != 2 * m) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(2 * m) + " columns");
        }
        ObjectivePoint p;
        p.values = Eigen::Map<Eigen::VectorXd>(row.data(), m);
        p.preference = Eigen::Map<Eigen::VectorXd>(row.data() + m, m);
        points.push_back(std::move(p));
    }
    return points;
}

}  // namespace pslmorl
