#include "phi4/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace phi4::fft {

namespace {

struct PlanCache {
    std::mutex mtx;
    // key: (d, n, sign)
    std::map<std::tuple<int, int, int>, fftw_plan> plans;

    fftw_plan get(const GridSpec& g, int sign) {
        std::lock_guard<std::mutex> lock(mtx);
        auto key = std::make_tuple(g.d, g.n, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;

        int dims[3] = {g.n, g.n, g.n};
        // Plan on a scratch buffer with FFTW_UNALIGNED so the plan can be
        // executed on any caller array via the new-array interface.
        std::vector<std::complex<double>> scratch(g.size());
        auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = fftw_plan_dft(g.d, dims, ptr, ptr, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans.emplace(key, p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

void forward(const GridSpec& g, std::complex<double>* data) {
    fftw_plan p = cache().get(g, FFTW_FORWARD);
    auto* ptr = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, ptr, ptr);
    const double scale = 1.0 / static_cast<double>(g.size());
    const std::size_t sz = g.size();
    for (std::size_t i = 0; i < sz; ++i) data[i] *= scale;
}

void backward(const GridSpec& g, std::complex<double>* data) {
    fftw_plan p = cache().get(g, FFTW_BACKWARD);
    auto* ptr = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, ptr, ptr);
}

void forward(const GridSpec& g, std::vector<std::complex<double>>& data) {
    forward(g, data.data());
}

void backward(const GridSpec& g, std::vector<std::complex<double>>& data) {
    backward(g, data.data());
}

}  // namespace phi4::fft
