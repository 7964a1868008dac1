#include "ltml/matrix.hpp"

#include <cmath>

namespace ltml {

bool Matrix::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

std::vector<std::int64_t> LabelMatrix::column_sums() const {
    std::vector<std::int64_t> sums(cols_, 0);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            sums[c] += (*this)(r, c);
    return sums;
}

}  // namespace ltml
