#pragma once

#include <vector>

#include "dsmooth/field.hpp"

namespace dsmooth {

// Pad factor that keeps a degree-k product alias-free on the retained band.
inline int pad_factor(int k) { return (k + 2) / 2; }

// Product of the fields, conjugating slots whose signature entry is -1, so the
// output frequency is xi = sum s_j xi_j. Evaluated on a grid padded by
// pad_factor(k) and truncated to the dealias cutoff.
inline FourierField dealiased_product(const std::vector<FourierField>& fields,
                                      const std::vector<int>& signature)
{
    require(!fields.empty(), "product needs at least one factor");
    require(fields.size() == signature.size(), "signature length must match factor count");
    const SpectralGrid& g = fields.front().grid;
    bool real = true;
    for (std::size_t j = 0; j < fields.size(); ++j) {
        require(fields[j].grid == g, "grid mismatch in product");
        require(signature[j] == 1 || signature[j] == -1, "signature entries must be +1 or -1");
        real = real && fields[j].real_symmetric;
    }
    PaddedTransform pt(g, pad_factor(int(fields.size())));
    const std::size_t m = pt.physical_size();
    std::vector<cplx> acc(m, cplx(1.0)), tmp(m);
    for (std::size_t j = 0; j < fields.size(); ++j) {
        pt.to_physical(fields[j], tmp.data());
        if (signature[j] > 0)
            for (std::size_t i = 0; i < m; ++i) acc[i] *= tmp[i];
        else
            for (std::size_t i = 0; i < m; ++i) acc[i] *= std::conj(tmp[i]);
    }
    FourierField out = pt.from_physical(acc.data());
    out.real_symmetric = real;
    return out;
}

} // namespace dsmooth
