#pragma once

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

#include "dsmooth/grid.hpp"

namespace dsmooth::fft {

// FFTW plans are created once per shape under a lock and then shared. We only
// ever run them through the new-array execute calls on buffers we own, and the
// plans are made with FFTW_UNALIGNED so the same codelets run whatever the
// buffer alignment: results are bit-reproducible across threads and calls.

enum class Kind { forward, backward, r2c, c2r };

class PlanCache {
public:
    static PlanCache& instance()
    {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(Kind kind, int dim, int n)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(int(kind), dim, n);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        fftw_plan p = make(kind, dim, n);
        plans_.emplace(key, p);
        return p;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;

    static fftw_plan make(Kind kind, int dim, int n)
    {
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        std::size_t total = dim == 1 ? std::size_t(n) : std::size_t(n) * n;
        auto* cin = fftw_alloc_complex(total);
        auto* cout = fftw_alloc_complex(total);
        auto* rbuf = fftw_alloc_real(total);
        fftw_plan p = nullptr;
        switch (kind) {
        case Kind::forward:
        case Kind::backward: {
            int sign = kind == Kind::forward ? FFTW_FORWARD : FFTW_BACKWARD;
            p = dim == 1 ? fftw_plan_dft_1d(n, cin, cout, sign, flags)
                         : fftw_plan_dft_2d(n, n, cin, cout, sign, flags);
            break;
        }
        case Kind::r2c:
            p = dim == 1 ? fftw_plan_dft_r2c_1d(n, rbuf, cout, flags)
                         : fftw_plan_dft_r2c_2d(n, n, rbuf, cout, flags);
            break;
        case Kind::c2r:
            p = dim == 1 ? fftw_plan_dft_c2r_1d(n, cin, rbuf, flags)
                         : fftw_plan_dft_c2r_2d(n, n, cin, rbuf, flags);
            break;
        }
        fftw_free(cin);
        fftw_free(cout);
        fftw_free(rbuf);
        return p;
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

// Unnormalized complex transforms: forward uses e^{-ikx}, backward e^{+ikx}.
// Input and output must not alias.
inline void c2c(Kind kind, int dim, int n, const cplx* in, cplx* out)
{
    fftw_plan p = PlanCache::instance().get(kind, dim, n);
    fftw_execute_dft(p, as_fftw(const_cast<cplx*>(in)), as_fftw(out));
}

// Real to half-complex; output holds n/2+1 entries along the last axis.
inline void r2c(int dim, int n, const double* in, cplx* out)
{
    fftw_plan p = PlanCache::instance().get(Kind::r2c, dim, n);
    fftw_execute_dft_r2c(p, const_cast<double*>(in), as_fftw(out));
}

// Half-complex to real. Clobbers its input, as FFTW does for multi-dim c2r.
inline void c2r(int dim, int n, cplx* in, double* out)
{
    fftw_plan p = PlanCache::instance().get(Kind::c2r, dim, n);
    fftw_execute_dft_c2r(p, as_fftw(in), out);
}

} // namespace dsmooth::fft
