#include "vortexsim/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <numbers>

namespace vortexsim {

namespace {

// the FFTW planner is not reentrant
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class Plan {
public:
    Plan(int ny, int nx, int sign) : n_(static_cast<std::size_t>(ny) * nx) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        buf_ = fftw_alloc_complex(n_);
        if (!buf_) throw Error("fftw allocation failed");
        plan_ = fftw_plan_dft_2d(ny, nx, buf_, buf_, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!plan_) {
            fftw_free(buf_);
            throw Error("fftw planning failed");
        }
    }
    ~Plan() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(buf_);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    void run(std::vector<cplx>& data) {
        std::memcpy(buf_, data.data(), n_ * sizeof(fftw_complex));
        fftw_execute(plan_);
        std::memcpy(static_cast<void*>(data.data()), buf_, n_ * sizeof(fftw_complex));
    }

private:
    std::size_t n_;
    fftw_complex* buf_ = nullptr;
    fftw_plan plan_ = nullptr;
};

// out[(i + si) % ny][(j + sj) % nx] = in[i][j]
void roll(std::vector<cplx>& data, int ny, int nx, int si, int sj) {
    std::vector<cplx> tmp(data.size());
    for (int i = 0; i < ny; ++i) {
        const int ti = (i + si) % ny;
        for (int j = 0; j < nx; ++j) tmp[static_cast<std::size_t>(ti) * nx + (j + sj) % nx] = data[static_cast<std::size_t>(i) * nx + j];
    }
    data.swap(tmp);
}

}  // namespace

void fft2(std::vector<cplx>& data, int ny, int nx, int sign) {
    if (data.size() != static_cast<std::size_t>(ny) * nx) throw Error("fft2 size mismatch");
    Plan p(ny, nx, sign);
    p.run(data);
}

void centered_fft2(std::vector<cplx>& data, int ny, int nx, int sign) {
    // move the centre sample to the origin, transform, move the origin back to the centre
    roll(data, ny, nx, ny - ny / 2, nx - nx / 2);
    fft2(data, ny, nx, sign);
    roll(data, ny, nx, ny / 2, nx / 2);
}

double fft_frequency(int n, int count, double pitch) {
    const int m = n < (count + 1) / 2 ? n : n - count;
    return 2.0 * std::numbers::pi * m / (count * pitch);
}

}  // namespace vortexsim
