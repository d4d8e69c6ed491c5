#pragma once

// Dense square matrices and state vectors. Coefficient matrices hold the
// interaction rates a_ij >= 0 (the weight agent j's value carries in agent
// i's update); in continuous time the diagonal is identically zero.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "cutbal/errors.hpp"

namespace cutbal {

using StateVector = std::vector<double>;

template <class T>
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n, const T& fill = T{})
        : n_(n), e_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {
        assert(n >= 0);
    }

    // Row-major construction from nested braces; rows must be square.
    SquareMatrix(std::initializer_list<std::initializer_list<T>> rows)
        : SquareMatrix(static_cast<int>(rows.size())) {
        int i = 0;
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != n_)
                throw SchemaError("matrix rows must all have length " + std::to_string(n_));
            int j = 0;
            for (const T& v : row) (*this)(i, j++) = v;
            ++i;
        }
    }

    static SquareMatrix identity(int n) {
        SquareMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    int n() const { return n_; }
    bool empty() const { return n_ == 0; }

    T& operator()(int i, int j) {
        assert(i >= 0 && i < n_ && j >= 0 && j < n_);
        return e_[static_cast<std::size_t>(i) * n_ + j];
    }
    const T& operator()(int i, int j) const {
        assert(i >= 0 && i < n_ && j >= 0 && j < n_);
        return e_[static_cast<std::size_t>(i) * n_ + j];
    }

    bool operator==(const SquareMatrix&) const = default;

    T row_sum(int i) const {
        T s{};
        for (int j = 0; j < n_; ++j) s += (*this)(i, j);
        return s;
    }
    T col_sum(int j) const {
        T s{};
        for (int i = 0; i < n_; ++i) s += (*this)(i, j);
        return s;
    }

    SquareMatrix& operator+=(const SquareMatrix& o) {
        assert(n_ == o.n_);
        for (std::size_t k = 0; k < e_.size(); ++k) e_[k] += o.e_[k];
        return *this;
    }
    SquareMatrix& operator*=(const T& s) {
        for (auto& v : e_) v *= s;
        return *this;
    }

    const std::vector<T>& raw() const { return e_; }

private:
    int n_ = 0;
    std::vector<T> e_;
};

using CoefficientMatrix = SquareMatrix<double>;

inline bool is_symmetric(const CoefficientMatrix& a, double eps = 0.0) {
    for (int i = 0; i < a.n(); ++i)
        for (int j = i + 1; j < a.n(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > eps) return false;
    return true;
}

// Throws when entries are negative/non-finite, and (continuous time only)
// when the diagonal is not identically zero.
inline void validate_coefficients(const CoefficientMatrix& a, bool zero_diagonal,
                                  const std::string& where) {
    for (int i = 0; i < a.n(); ++i) {
        for (int j = 0; j < a.n(); ++j) {
            const double v = a(i, j);
            if (!std::isfinite(v))
                throw SchemaError(where + ": non-finite coefficient a_" + std::to_string(i + 1) +
                                  "_" + std::to_string(j + 1));
            if (v < 0.0)
                throw SchemaError(where + ": negative coefficient a_" + std::to_string(i + 1) +
                                  "_" + std::to_string(j + 1));
        }
        if (zero_diagonal && a(i, i) != 0.0)
            throw SchemaError(where + ": diagonal entry a_" + std::to_string(i + 1) + "_" +
                              std::to_string(i + 1) + " must be zero in continuous time");
    }
}

inline void validate_state(const StateVector& x, const std::string& where) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]))
            throw SchemaError(where + ": non-finite state entry x_" + std::to_string(i + 1));
}

inline double spread(const StateVector& x) {
    if (x.empty()) return 0.0;
    double lo = x[0], hi = x[0];
    for (double v : x) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

}  // namespace cutbal
