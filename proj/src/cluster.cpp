#include "carpool/cluster.hpp"

#include "carpool/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace carpool {

namespace {

OdVector project(const GpsSample& origin, const GpsSample& destination, const GeoPoint& reference) {
    const LocalProjection proj(reference);
    const PlanarXY o = proj.forward(origin.position);
    const PlanarXY d = proj.forward(destination.position);
    return {o.x, o.y, d.x, d.y};
}

struct Candidate {
    double distance = std::numeric_limits<double>::infinity();
    std::size_t lo = std::numeric_limits<std::size_t>::max();  // smaller cluster id
    std::size_t hi = std::numeric_limits<std::size_t>::max();
    std::size_t slot_i = 0;
    std::size_t slot_j = 0;

    bool better_than(const Candidate& o) const noexcept {
        return std::tie(distance, lo, hi) < std::tie(o.distance, o.lo, o.hi);
    }
};

// Dense symmetric matrix over slots; slot i holds the cluster whose id is ids[i].
class LinkageState {
public:
    LinkageState(std::span<const OdVector> vectors, Execution exec)
        : n_(vectors.size()), dist_(n_ * n_, 0.0), ids_(n_), active_(n_, 1), sizes_(n_, 1) {
        std::iota(ids_.begin(), ids_.end(), std::size_t{0});
        const auto n = static_cast<std::ptrdiff_t>(n_);
        if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
            for (std::ptrdiff_t i = 0; i < n; ++i) {
                fill_row(vectors, static_cast<std::size_t>(i));
            }
        } else {
            for (std::ptrdiff_t i = 0; i < n; ++i) {
                fill_row(vectors, static_cast<std::size_t>(i));
            }
        }
    }

    Candidate closest_pair_serial() const {
        Candidate best;
        for (std::size_t i = 0; i < n_; ++i) {
            scan_row(i, best);
        }
        return best;
    }

    Candidate closest_pair_parallel() const {
        Candidate best;
        const auto n = static_cast<std::ptrdiff_t>(n_);
#pragma omp parallel
        {
            Candidate local;
#pragma omp for schedule(static) nowait
            for (std::ptrdiff_t i = 0; i < n; ++i) {
                scan_row(static_cast<std::size_t>(i), local);
            }
#pragma omp critical(carpool_linkage_min)
            {
                if (local.better_than(best)) {
                    best = local;
                }
            }
        }
        return best;
    }

    // Merges slot j into slot i and gives it `new_id`.
    void merge(std::size_t i, std::size_t j, std::size_t new_id, Execution exec) {
        const auto n = static_cast<std::ptrdiff_t>(n_);
        auto update = [&](std::size_t k) {
            if (!active_[k] || k == i || k == j) {
                return;
            }
            const double d = std::max(at(i, k), at(j, k));
            dist_[i * n_ + k] = d;
            dist_[k * n_ + i] = d;
        };
        if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t k = 0; k < n; ++k) {
                update(static_cast<std::size_t>(k));
            }
        } else {
            for (std::ptrdiff_t k = 0; k < n; ++k) {
                update(static_cast<std::size_t>(k));
            }
        }
        active_[j] = 0;
        sizes_[i] += sizes_[j];
        ids_[i] = new_id;
    }

    std::size_t id(std::size_t slot) const { return ids_[slot]; }
    std::size_t size(std::size_t slot) const { return sizes_[slot]; }

private:
    double at(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }

    void fill_row(std::span<const OdVector> vectors, std::size_t i) {
        for (std::size_t j = 0; j < n_; ++j) {
            dist_[i * n_ + j] = i == j ? 0.0 : od_distance(vectors[i], vectors[j]);
        }
    }

    void scan_row(std::size_t i, Candidate& best) const {
        if (!active_[i]) {
            return;
        }
        for (std::size_t j = i + 1; j < n_; ++j) {
            if (!active_[j]) {
                continue;
            }
            Candidate c{at(i, j), std::min(ids_[i], ids_[j]), std::max(ids_[i], ids_[j]), i, j};
            if (c.better_than(best)) {
                best = c;
            }
        }
    }

    std::size_t n_;
    std::vector<double> dist_;
    std::vector<std::size_t> ids_;
    std::vector<char> active_;
    std::vector<std::size_t> sizes_;
};

}  // namespace

OdVector od_vector(const Trace& trace, const GeoPoint& reference) {
    return project(trace.origin(), trace.destination(), reference);
}

OdVector od_vector(const SimplifiedTrace& trace, const GeoPoint& reference) {
    return project(trace.origin, trace.destination, reference);
}

double od_distance(const OdVector& a, const OdVector& b) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

Dendrogram complete_linkage(std::span<const OdVector> vectors, Execution exec) {
    if (vectors.empty()) {
        throw Error(ErrorCode::InvalidArgument, "complete_linkage needs at least one vector");
    }
    for (const auto& v : vectors) {
        for (const double c : v) {
            if (!std::isfinite(c)) {
                throw Error(ErrorCode::InvalidArgument, "OD vector coordinates must be finite");
            }
        }
    }
    const std::size_t n = vectors.size();
    Dendrogram out{n, {}};
    out.merges.reserve(n - 1);
    LinkageState state(vectors, exec);
    for (std::size_t step = 0; step + 1 < n; ++step) {
        const Candidate c = exec == Execution::parallel ? state.closest_pair_parallel() : state.closest_pair_serial();
        const std::size_t merged_size = state.size(c.slot_i) + state.size(c.slot_j);
        out.merges.push_back({c.lo, c.hi, c.distance, merged_size});
        state.merge(c.slot_i, c.slot_j, n + step, exec);
    }
    return out;
}

ClusterLabels cut(const Dendrogram& dendrogram, double h, std::span<const std::string> ids) {
    if (!(h >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "cut height must be non-negative");
    }
    const std::size_t n = dendrogram.leaf_count;
    if (!ids.empty() && ids.size() != n) {
        throw Error(ErrorCode::InvalidArgument, "id count does not match the dendrogram's leaves");
    }

    // Union-find over cluster ids 0 .. 2n-2.
    std::vector<std::size_t> parent(n + dendrogram.merges.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t k = 0; k < dendrogram.merges.size(); ++k) {
        const Merge& m = dendrogram.merges[k];
        if (m.height > h) {
            continue;
        }
        parent[find(m.a)] = n + k;
        parent[find(m.b)] = n + k;
    }

    ClusterLabels out;
    out.labels.resize(n);
    std::vector<std::size_t> label_of_root(parent.size(), std::numeric_limits<std::size_t>::max());
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        const std::size_t root = find(leaf);
        if (label_of_root[root] == std::numeric_limits<std::size_t>::max()) {
            label_of_root[root] = out.sizes.size();
            out.sizes.push_back(0);
        }
        out.labels[leaf] = label_of_root[root];
        ++out.sizes[out.labels[leaf]];
    }
    out.trace_ids.reserve(n);
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        out.trace_ids.push_back(ids.empty() ? std::to_string(leaf) : ids[leaf]);
    }
    return out;
}

std::vector<std::string> door_to_door_matches(const ClusterLabels& labels) {
    if (labels.sizes.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no clusters");
    }
    const std::size_t largest = *std::max_element(labels.sizes.begin(), labels.sizes.end());
    // Smallest member id of each cluster decides ties.
    std::vector<const std::string*> smallest(labels.sizes.size(), nullptr);
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
        const std::string*& s = smallest[labels.labels[i]];
        if (s == nullptr || labels.trace_ids[i] < *s) {
            s = &labels.trace_ids[i];
        }
    }
    std::size_t chosen = labels.sizes.size();
    for (std::size_t c = 0; c < labels.sizes.size(); ++c) {
        if (labels.sizes[c] != largest) {
            continue;
        }
        if (chosen == labels.sizes.size() || *smallest[c] < *smallest[chosen]) {
            chosen = c;
        }
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
        if (labels.labels[i] == chosen) {
            out.push_back(labels.trace_ids[i]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

ClusterLabels cluster_traces(std::span<const SimplifiedTrace> traces, const GeoPoint& reference, double h,
                             Execution exec) {
    std::vector<OdVector> vectors;
    std::vector<std::string> ids;
    vectors.reserve(traces.size());
    ids.reserve(traces.size());
    for (const auto& t : traces) {
        vectors.push_back(od_vector(t, reference));
        ids.push_back(t.trace_id);
    }
    return cut(complete_linkage(vectors, exec), h, ids);
}

}  // namespace carpool
