#include "qnls/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "qnls/errors.hpp"

namespace qnls {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

// Plan cache keyed by (dim, n). Plans are created with FFTW_ESTIMATE so that
// transform results are reproducible run to run, and in-place on a scratch
// buffer reused via the new-array execute interface.
std::mutex plan_mutex;
std::map<std::pair<int, int>, PlanPair> plan_cache;

PlanPair& get_plans(const Grid& g) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(g.dim, g.n);
    auto it = plan_cache.find(key);
    if (it != plan_cache.end()) return it->second;

    std::vector<cxd> scratch(g.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    int dims[3] = {g.n, g.n, g.n};
    PlanPair p;
    p.fwd = fftw_plan_dft(g.dim, dims, buf, buf, FFTW_FORWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft(g.dim, dims, buf, buf, FFTW_BACKWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p.fwd || !p.bwd) throw Error("fftw planning failed");
    return plan_cache.emplace(key, p).first->second;
}

} // namespace

void fft_forward(const Grid& g, std::vector<cxd>& data) {
    if (data.size() != g.size()) throw GridMismatch("fft_forward: size mismatch");
    PlanPair& p = get_plans(g);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p.fwd, buf, buf);
}

void fft_inverse(const Grid& g, std::vector<cxd>& data) {
    if (data.size() != g.size()) throw GridMismatch("fft_inverse: size mismatch");
    PlanPair& p = get_plans(g);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p.bwd, buf, buf);
    const double inv = 1.0 / static_cast<double>(g.size());
    for (cxd& z : data) z *= inv;
}

} // namespace qnls
