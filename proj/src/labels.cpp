#include "vdm/labels.hpp"

#include <stdexcept>

namespace vdm {

std::int64_t pow3(int m) {
    if (m < 0) throw std::invalid_argument("pow3: negative exponent");
    std::int64_t p = 1;
    for (int i = 0; i < m; ++i) p *= 3;
    return p;
}

std::int64_t label_encode(const std::vector<Trit>& trits) {
    std::int64_t idx = 0;
    std::int64_t place = 1;
    for (const Trit t : trits) {
        idx += static_cast<std::int64_t>(t) * place;
        place *= 3;
    }
    return idx;
}

std::vector<Trit> label_decode(std::int64_t index, int m) {
    if (index < 0 || index >= pow3(m))
        throw std::out_of_range("label_decode: index outside [0, 3^M)");
    std::vector<Trit> trits(m);
    for (int s = 0; s < m; ++s) {
        trits[s] = static_cast<Trit>(index % 3);
        index /= 3;
    }
    return trits;
}

Trit label_digit(std::int64_t index, int slot) {
    for (int s = 1; s < slot; ++s) index /= 3;
    return static_cast<Trit>(index % 3);
}

std::int64_t label_swap_yz(std::int64_t index, int m) {
    std::int64_t out = 0;
    std::int64_t place = 1;
    for (int s = 0; s < m; ++s) {
        std::int64_t d = index % 3;
        index /= 3;
        if (d == 1) d = 2;
        else if (d == 2) d = 1;
        out += d * place;
        place *= 3;
    }
    return out;
}

}  // namespace vdm
