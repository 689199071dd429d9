#include "casimir/scaling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace casimir {

namespace {

struct FitResult {
    double L = 0.0, c = 0.0, p = 0.0, sse = 0.0;
};

// Linear least squares for (L, c) at fixed exponent p.
FitResult fit_at_p(const std::vector<double>& V, const std::vector<double>& y, double p) {
    const std::size_t n = V.size();
    double s1 = static_cast<double>(n), sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::pow(V[i], -p);
        sx += x;
        sxx += x * x;
        sy += y[i];
        sxy += x * y[i];
    }
    const double det = s1 * sxx - sx * sx;
    FitResult r;
    r.p = p;
    if (std::abs(det) < 1e-300) {
        r.L = sy / s1;
        r.c = 0.0;
    } else {
        r.L = (sxx * sy - sx * sxy) / det;
        r.c = (s1 * sxy - sx * sy) / det;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (r.L + r.c * std::pow(V[i], -p));
        r.sse += e * e;
    }
    return r;
}

// Least squares by Householder QR with column scaling; A is n x m,
// column-major, n >= m. Returns coefficients and the residual SSE.
std::vector<double> qr_least_squares(std::vector<double> A, std::vector<double> b, std::size_t n,
                                     std::size_t m, double* sse) {
    std::vector<double> scale(m, 1.0);
    for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += A[j * n + i] * A[j * n + i];
        scale[j] = s > 0.0 ? std::sqrt(s) : 1.0;
        for (std::size_t i = 0; i < n; ++i) A[j * n + i] /= scale[j];
    }
    for (std::size_t j = 0; j < m; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += A[j * n + i] * A[j * n + i];
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        if (A[j * n + j] > 0.0) norm = -norm;
        // Householder vector v stored in place of column j below the diagonal
        const double alpha = A[j * n + j];
        A[j * n + j] = alpha - norm;
        double vnorm2 = 0.0;
        for (std::size_t i = j; i < n; ++i) vnorm2 += A[j * n + i] * A[j * n + i];
        if (vnorm2 == 0.0) {
            A[j * n + j] = norm;
            continue;
        }
        for (std::size_t c = j + 1; c < m; ++c) {
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += A[j * n + i] * A[c * n + i];
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < n; ++i) A[c * n + i] -= f * A[j * n + i];
        }
        double dot = 0.0;
        for (std::size_t i = j; i < n; ++i) dot += A[j * n + i] * b[i];
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < n; ++i) b[i] -= f * A[j * n + i];
        A[j * n + j] = norm;
        for (std::size_t i = j + 1; i < n; ++i) A[j * n + i] = 0.0;
    }
    std::vector<double> c(m, 0.0);
    for (std::size_t j = m; j-- > 0;) {
        double s = b[j];
        for (std::size_t k = j + 1; k < m; ++k) s -= A[k * n + j] * c[k];
        c[j] = std::abs(A[j * n + j]) > 1e-300 ? s / A[j * n + j] : 0.0;
    }
    if (sse) {
        *sse = 0.0;
        for (std::size_t i = m; i < n; ++i) *sse += b[i] * b[i];
    }
    for (std::size_t j = 0; j < m; ++j) c[j] /= scale[j];
    return c;
}

}  // namespace

int max_threads() {
    if (const char* env = std::getenv("CASIMIR_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int nthreads = std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(nthreads);
    std::exception_ptr err;
    std::mutex err_mu;
    for (int t = 0; t < nthreads; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (err) std::rethrow_exception(err);
}

std::vector<double> volume_sequence(double v0, int count) {
    if (v0 <= 0.0 || count < 1) throw std::invalid_argument("volume_sequence: bad parameters");
    std::vector<double> v(count);
    for (int k = 0; k < count; ++k) v[k] = v0 * std::ldexp(1.0, k);
    return v;
}

ScalingSeries fit_series(std::vector<double> volumes, std::vector<double> values,
                         SweepOptions opts) {
    if (volumes.size() != values.size())
        throw std::invalid_argument("fit_series: size mismatch");
    if (volumes.size() < 4)
        throw std::invalid_argument("fit_series: need at least 4 volumes for extrapolation");
    for (std::size_t i = 1; i < volumes.size(); ++i)
        if (volumes[i] <= volumes[i - 1])
            throw std::invalid_argument("fit_series: volumes must be strictly increasing");

    ScalingSeries s;
    s.volumes = std::move(volumes);
    s.values = std::move(values);
    const std::size_t n = s.values.size();

    double scale = 0.0;
    for (double v : s.values) scale = std::max(scale, std::abs(v));

    double spread = 0.0;
    for (double v : s.values) spread = std::max(spread, std::abs(v - s.values.back()));
    if (spread <= 1e-15 * std::max(scale, 1.0)) {
        // constant series: limit is the common value, no decay to fit
        s.extrapolated_limit = s.values.back();
        s.fit_exponent = 0.0;
        s.fit_coefficient = 0.0;
        s.residual = 0.0;
        s.converged = true;
        return s;
    }

    // coarse log-spaced scan over p, then golden-section refinement
    FitResult best;
    best.sse = std::numeric_limits<double>::infinity();
    for (double p = 0.02; p <= 4.0; p *= 1.07) {
        const FitResult r = fit_at_p(s.volumes, s.values, p);
        if (r.sse < best.sse) best = r;
    }
    {
        double lo = best.p / 1.07, hi = best.p * 1.07;
        const double gr = 0.6180339887498949;
        double a = lo, b = hi;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = fit_at_p(s.volumes, s.values, x1).sse;
        double f2 = fit_at_p(s.volumes, s.values, x2).sse;
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = fit_at_p(s.volumes, s.values, x1).sse;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = fit_at_p(s.volumes, s.values, x2).sse;
            }
        }
        const FitResult r = fit_at_p(s.volumes, s.values, 0.5 * (a + b));
        if (r.sse <= best.sse) best = r;
    }

    s.extrapolated_limit = best.L;
    s.fit_exponent = best.p;
    s.fit_coefficient = best.c;
    s.residual = std::sqrt(best.sse / static_cast<double>(n));

    const double gate = std::max(opts.abs_tol, opts.rel_tol * std::max(scale, 1e-300));
    bool ok = s.residual < gate;
    // liminf proxy: last three samples monotone within 3x residual
    if (ok && n >= 3) {
        const double d1 = s.values[n - 2] - s.values[n - 3];
        const double d2 = s.values[n - 1] - s.values[n - 2];
        const double noise = 3.0 * s.residual + opts.abs_tol;
        if (d1 * d2 < 0.0 && std::min(std::abs(d1), std::abs(d2)) > noise) ok = false;
    }
    s.converged = ok;
    return s;
}

ScalingSeries fit_series_log(std::vector<double> volumes, std::vector<double> values, double q,
                             int order, SweepOptions opts) {
    if (volumes.size() != values.size())
        throw std::invalid_argument("fit_series_log: size mismatch");
    if (!(q > 0.0)) throw std::invalid_argument("fit_series_log: require q > 0");
    if (order < 1 || order > 4) throw std::invalid_argument("fit_series_log: order must be 1..4");
    // columns: 1, then per m = 1..order the block V^{-mq} ln^t V, t = 0..m
    std::size_t m_cols = 1;
    for (int m = 1; m <= order; ++m) m_cols += static_cast<std::size_t>(m) + 1;
    const std::size_t n = volumes.size();
    if (n < m_cols + 1)
        throw std::invalid_argument("fit_series_log: need more volumes than fit coefficients");
    for (std::size_t i = 1; i < n; ++i)
        if (volumes[i] <= volumes[i - 1])
            throw std::invalid_argument("fit_series_log: volumes must be strictly increasing");

    std::vector<double> A(m_cols * n);
    for (std::size_t i = 0; i < n; ++i) A[i] = 1.0;
    std::size_t col = 1;
    for (int m = 1; m <= order; ++m) {
        for (int t = 0; t <= m; ++t, ++col) {
            for (std::size_t i = 0; i < n; ++i) {
                const double lv = std::log(volumes[i]);
                A[col * n + i] = std::pow(volumes[i], -q * m) * std::pow(lv, t);
            }
        }
    }
    double sse = 0.0;
    const std::vector<double> c = qr_least_squares(std::move(A), values, n, m_cols, &sse);

    ScalingSeries s;
    s.volumes = std::move(volumes);
    s.values = std::move(values);
    s.extrapolated_limit = c[0];
    s.fit_exponent = q;
    s.fit_coefficient = c[1];
    s.residual = std::sqrt(sse / static_cast<double>(n));
    double scale = 0.0, lo = s.values[0], hi = s.values[0];
    for (double v : s.values) {
        scale = std::max(scale, std::abs(v));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    s.converged = s.residual < std::max(opts.abs_tol, opts.rel_tol * std::max(scale, 1e-300));
    // sanity gate: a near-interpolating fit of data the model cannot
    // represent extrapolates far outside the sampled range; refuse it
    const double range = hi - lo;
    if (s.extrapolated_limit < lo - range || s.extrapolated_limit > hi + range)
        s.converged = false;
    return s;
}

ScalingSeries fit_decay_exponent(const std::vector<double>& volumes,
                                 const std::vector<double>& values, double q, SweepOptions opts) {
    if (volumes.size() != values.size())
        throw std::invalid_argument("fit_decay_exponent: size mismatch");
    const std::size_t n = volumes.size();
    if (n < 6) throw std::invalid_argument("fit_decay_exponent: need at least 6 volumes");
    std::vector<double> mids(n - 1), slopes(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(values[i] > 0.0) || !(values[i + 1] > 0.0))
            throw std::invalid_argument("fit_decay_exponent: values must be positive");
        mids[i] = std::sqrt(volumes[i] * volumes[i + 1]);
        slopes[i] = -(std::log(values[i + 1]) - std::log(values[i])) /
                    (std::log(volumes[i + 1]) - std::log(volumes[i]));
    }
    return fit_series_log(std::move(mids), std::move(slopes), q, 2, opts);
}

ScalingSeries run_sweep(const std::function<double(double)>& observable,
                        const std::vector<double>& volumes, SweepOptions opts) {
    if (volumes.size() < 4)
        throw std::invalid_argument("run_sweep: need at least 4 volumes");
    std::vector<double> values(volumes.size());
    parallel_for(volumes.size(), [&](std::size_t i) { values[i] = observable(volumes[i]); });
    return fit_series(volumes, std::move(values), opts);
}

ExponentTest exponent_test(const ScalingSeries& series, double hypothesis_p, double tol) {
    if (!series.converged)
        throw std::runtime_error("exponent_test: series has not converged; refusing to test");
    ExponentTest t;
    t.margin = std::abs(series.fit_exponent - hypothesis_p);
    t.pass = t.margin <= tol;
    return t;
}

}  // namespace casimir
