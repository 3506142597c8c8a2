#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "seisflat/common.hpp"

namespace seisflat {

// Compressed sparse rows with per-row column-sorted entries.
struct CsrMatrix {
    int n = 0;
    std::vector<int> row_ptr;  // size n+1
    std::vector<int> cols;
    std::vector<double> vals;

    [[nodiscard]] std::size_t nnz() const { return vals.size(); }

    // Entry lookup by binary search; absent entries are 0.
    [[nodiscard]] double at(int i, int j) const;

    void matvec(const std::vector<double>& x, std::vector<double>& y) const;
};

// Row-at-a-time builder; rows must be appended in index order with
// strictly ascending columns.
class CsrBuilder {
public:
    explicit CsrBuilder(int n) : n_(n) { row_ptr_.reserve(n + 1); row_ptr_.push_back(0); }

    void add(int col, double val) {
        cols_.push_back(col);
        vals_.push_back(val);
    }

    void finish_row() { row_ptr_.push_back(static_cast<int>(cols_.size())); }

    CsrMatrix take() {
        if (static_cast<int>(row_ptr_.size()) != n_ + 1)
            throw validation_error("CsrBuilder: row count mismatch");
        return CsrMatrix{n_, std::move(row_ptr_), std::move(cols_), std::move(vals_)};
    }

private:
    int n_;
    std::vector<int> row_ptr_;
    std::vector<int> cols_;
    std::vector<double> vals_;
};

inline double CsrMatrix::at(int i, int j) const {
    int lo = row_ptr[i], hi = row_ptr[i + 1];
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (cols[mid] < j)
            lo = mid + 1;
        else
            hi = mid;
    }
    return (lo < row_ptr[i + 1] && cols[lo] == j) ? vals[lo] : 0.0;
}

inline void CsrMatrix::matvec(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * x[cols[k]];
        y[i] = s;
    }
}

}  // namespace seisflat
