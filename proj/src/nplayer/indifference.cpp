#include <cmath>
#include <limits>

#include "mfglab/errors.hpp"
#include "mfglab/nplayer.hpp"

namespace mfglab::nplayer {

FlmpReport flmp_distance(const std::vector<Trajectory>& paths, const std::vector<Trajectory>& candidates) {
    if (candidates.empty()) throw InvalidArgument("flmp_distance: no candidates");
    FlmpReport report;
    report.histogram.assign(candidates.size(), 0);
    for (const Trajectory& path : paths) {
        std::vector<double> d(candidates.size(), 0.0);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const Trajectory& cand = candidates[c];
            if (std::abs(cand.grid().horizon() - path.grid().horizon()) > 1e-12) {
                throw InvalidArgument("flmp_distance: candidate horizon differs from the paths");
            }
            const bool same_grid = cand.grid() == path.grid();
            for (std::size_t k = 0; k < path.size(); ++k) {
                const double ref = same_grid ? cand(k, 0) : interpolate(cand, 0, path.grid().node(k));
                d[c] = std::max(d[c], std::abs(path(k, 0) - ref));
            }
        }
        std::size_t best = 0;
        for (std::size_t c = 1; c < d.size(); ++c) {
            if (d[c] < d[best]) best = c;
        }
        report.nearest.push_back(static_cast<int>(best));
        report.nearest_distance.push_back(d[best]);
        report.distances.push_back(std::move(d));
        ++report.histogram[best];
    }
    return report;
}

FlmpReport flmp_distance(const SamplePathSet& paths, const std::vector<Trajectory>& candidates) {
    std::vector<Trajectory> rows;
    rows.reserve(static_cast<std::size_t>(paths.replicas()));
    for (int r = 0; r < paths.replicas(); ++r) rows.push_back(paths.path(r));
    return flmp_distance(rows, candidates);
}

std::vector<std::vector<double>> indifference_curve(const NPlayerValue& values, double dead_band) {
    const int N = values.N();
    std::vector<std::vector<double>> out(values.grid().size());
    for (std::size_t k = 0; k < values.grid().size(); ++k) {
        int last = -1;  // last index with |Y| > dead_band
        int last_sign = 0;
        for (int n = 0; n <= N; ++n) {
            const double y = values.difference(n, k);
            if (std::abs(y) <= dead_band) continue;
            const int s = y > 0.0 ? 1 : -1;
            if (last_sign < 0 && s > 0) {
                if (n == last + 1) {
                    const double lo = values.difference(last, k);
                    out[k].push_back(last + lo / (lo - y));
                } else {
                    out[k].push_back(0.5 * (last + n));
                }
            }
            last = n;
            last_sign = s;
        }
    }
    return out;
}

}  // namespace mfglab::nplayer
