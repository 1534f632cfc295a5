#include "arblab/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arblab/errors.hpp"

namespace arblab {

void DriftVolSnapshot::validate() const {
    if (alpha.size() < 2) throw ValidationError("snapshot: need at least 2 securities");
    if (sigma.rows() != alpha.size())
        throw ValidationError("snapshot: sigma must have one row per security");
    if (sigma.cols() < 1) throw ValidationError("snapshot: need at least 1 driver");
    if (!alpha.allFinite() || !sigma.allFinite())
        throw ValidationError("snapshot: non-finite input");
}

namespace {

// First index with |v| above a fixed noise floor; used only for tie-breaking
// in the deterministic column order.
int first_nonzero_index(const Eigen::VectorXd& v) {
    for (int i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > 1e-12) return i;
    return static_cast<int>(v.size());
}

}  // namespace

GaugeDecomposition decompose(const DriftVolSnapshot& snapshot, double rank_tol) {
    snapshot.validate();
    if (!(rank_tol > 0.0)) throw ValidationError("decompose: rank_tol must be positive");

    const int n = snapshot.n_securities();
    const int m = snapshot.n_drivers();
    const Eigen::VectorXd& alpha = snapshot.alpha;

    GaugeDecomposition d;
    d.market_drift = alpha.mean();
    d.market_vol = snapshot.sigma.colwise().mean();
    d.excess_vol = snapshot.sigma.rowwise() - d.market_vol.transpose();

    // Minimum-norm least squares of the centered drift on the excess vol.
    const Eigen::VectorXd centered = alpha.array() - d.market_drift;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.excess_vol, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double sv_max = sv.size() > 0 ? sv[0] : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > rank_tol * sv_max && sv[i] > 0.0) ++rank;

    d.beta = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < rank; ++i) {
        const double coef = svd.matrixU().col(i).dot(centered) / sv[i];
        d.beta += coef * svd.matrixV().col(i);
    }

    // J spans the orthogonal complement of span{1, range(sigma_hat)}. The
    // range is spanned by the leading `rank` left singular vectors, which are
    // already orthogonal to 1 because centered columns sum to zero.
    d.k = n - 1 - rank;
    Eigen::MatrixXd q(n, rank + 1);
    q.col(0) = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    for (int i = 0; i < rank; ++i) q.col(i + 1) = svd.matrixU().col(i);
    const Eigen::MatrixXd full = Eigen::HouseholderQR<Eigen::MatrixXd>(q)
                                     .householderQ() * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd basis = full.rightCols(d.k);

    // Deterministic orientation: largest-magnitude entry of each column made
    // positive (lowest index wins ties), then columns sorted by descending
    // |alpha_A| with first-nonzero-index and original position as tie-breaks.
    for (int j = 0; j < d.k; ++j) {
        int arg = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(basis(i, j)) > std::abs(basis(arg, j))) arg = i;
        if (basis(arg, j) < 0.0) basis.col(j) = -basis.col(j);
    }
    Eigen::VectorXd projections = basis.transpose() * alpha;
    std::vector<int> order(d.k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double pa = std::abs(projections[a]);
        const double pb = std::abs(projections[b]);
        if (pa != pb) return pa > pb;
        return first_nonzero_index(basis.col(a)) < first_nonzero_index(basis.col(b));
    });
    d.J.resize(n, d.k);
    d.alpha_A.resize(d.k);
    for (int j = 0; j < d.k; ++j) {
        d.J.col(j) = basis.col(order[j]);
        d.alpha_A[j] = projections[order[j]];
    }

    d.reconstruction_residual = (alpha - reconstruct_drift(d)).norm();
    return d;
}

Eigen::VectorXd reconstruct_drift(const GaugeDecomposition& decomp) {
    Eigen::VectorXd out = Eigen::VectorXd::Constant(decomp.n_securities(), decomp.market_drift);
    out += decomp.excess_vol * decomp.beta;
    if (decomp.k > 0) out += decomp.J * decomp.alpha_A;
    return out;
}

double arbitrage_measure(const GaugeDecomposition& decomp) {
    return decomp.alpha_A.squaredNorm();
}

double arbitrage_wealth(const std::vector<GaugeDecomposition>& decomps, const TimeGrid& grid) {
    grid.validate();
    if (static_cast<int>(decomps.size()) != grid.steps)
        throw ValidationError("arbitrage_wealth: need one decomposition per grid slice");
    double total = 0.0;
    const double dt = grid.dt();
    for (const auto& d : decomps) total += arbitrage_measure(d) * dt;
    return total;
}

DriftVolSnapshot snapshot_at_slice(const MarketSpec& spec, const TimeGrid& grid, int k) {
    if (k < 0 || k >= grid.steps) throw ValidationError("snapshot_at_slice: slice out of range");
    DriftVolSnapshot snap;
    const double t = grid.slice_time(k);
    snap.alpha = spec.drift_at(t);
    snap.sigma = spec.vol_at(t);
    snap.t = grid.time_at(k);
    return snap;
}

DecompositionSchedule decompose_schedule(const MarketSpec& spec, const TimeGrid& grid,
                                         double rank_tol) {
    spec.validate();
    grid.validate();
    DecompositionSchedule sched;
    sched.slice_segment.resize(grid.steps);

    // Segments change only where a drift or vol breakpoint falls.
    int last_drift = -1, last_vol = -1;
    for (int k = 0; k < grid.steps; ++k) {
        const double t = grid.slice_time(k);
        const int ds = static_cast<int>(spec.drift.segment_at(t));
        const int vs = static_cast<int>(spec.vol.segment_at(t));
        if (ds != last_drift || vs != last_vol) {
            sched.segments.push_back(decompose(snapshot_at_slice(spec, grid, k), rank_tol));
            last_drift = ds;
            last_vol = vs;
        }
        sched.slice_segment[k] = static_cast<int>(sched.segments.size()) - 1;
    }
    return sched;
}

std::vector<GaugeDecomposition> DecompositionSchedule::per_slice() const {
    std::vector<GaugeDecomposition> out;
    out.reserve(slice_segment.size());
    for (int seg : slice_segment) out.push_back(segments[seg]);
    return out;
}

}  // namespace arblab
