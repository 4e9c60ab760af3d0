#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace mvs::detail {
namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Plans are made on aligned scratch buffers (SIMD codelets are about twice as
// fast as the FFTW_UNALIGNED ones); callers whose arrays are not aligned the
// same way are routed through the scratch copies. Both paths run the same plan,
// so results do not depend on the route.
struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    double* real_buf = nullptr;
    fftw_complex* half_buf = nullptr;
    std::size_t real_size = 0, half_size = 0;

    explicit PlanPair(int n)
        : real_size(static_cast<std::size_t>(n) * n), half_size(static_cast<std::size_t>(n) * (n / 2 + 1)) {
        std::lock_guard lock(planner_mutex());
        real_buf = fftw_alloc_real(real_size);
        half_buf = fftw_alloc_complex(half_size);
        forward = fftw_plan_dft_r2c_2d(n, n, real_buf, half_buf, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_2d(n, n, half_buf, real_buf, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
        if (!forward || !backward) throw std::runtime_error("FFTW plan creation failed");
    }
    ~PlanPair() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(real_buf);
        fftw_free(half_buf);
    }
    bool aligned(const void* a, const void* b) const {
        return fftw_alignment_of(const_cast<double*>(static_cast<const double*>(a))) ==
                   fftw_alignment_of(real_buf) &&
               fftw_alignment_of(const_cast<double*>(static_cast<const double*>(b))) ==
                   fftw_alignment_of(reinterpret_cast<double*>(half_buf));
    }
    PlanPair(const PlanPair&) = delete;
    PlanPair& operator=(const PlanPair&) = delete;
};

const PlanPair& plans_for(int n) {
    thread_local std::map<int, std::unique_ptr<PlanPair>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<PlanPair>(n)).first;
    return *it->second;
}

}  // namespace

void fft_r2c(int n, std::span<const double> in, std::span<std::complex<double>> out) {
    const auto& p = plans_for(n);
    if (p.aligned(in.data(), out.data())) {
        // FFTW's new-array execute does not modify the input of an r2c plan.
        fftw_execute_dft_r2c(p.forward, const_cast<double*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
        return;
    }
    std::copy(in.begin(), in.begin() + p.real_size, p.real_buf);
    fftw_execute(p.forward);
    const auto* h = reinterpret_cast<const std::complex<double>*>(p.half_buf);
    std::copy(h, h + p.half_size, out.begin());
}

void fft_c2r(int n, std::span<std::complex<double>> in, std::span<double> out) {
    const auto& p = plans_for(n);
    if (p.aligned(out.data(), in.data())) {
        fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(in.data()), out.data());
        return;
    }
    std::copy(in.begin(), in.begin() + p.half_size, reinterpret_cast<std::complex<double>*>(p.half_buf));
    fftw_execute(p.backward);
    std::copy(p.real_buf, p.real_buf + p.real_size, out.begin());
}

}  // namespace mvs::detail
