#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qperc {

template <typename T>
struct ScalarTraits {
    static constexpr bool exact = true;
    static bool positive(const T& v) { return v > T(0); }
    static bool negative(const T& v) { return v < T(0); }
    static bool pivot_ok(const T& v) { return v > T(0); }
    static T magnitude(const T& v) { return v < T(0) ? T(-v) : v; }
    static void clean(T&) {}
};

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static bool positive(double v) { return v > 1e-11; }
    static bool negative(double v) { return v < -1e-10; }
    static bool pivot_ok(double v) { return v > 1e-9; }
    static double magnitude(double v) { return std::abs(v); }
    // Rounding noise on degenerate pivots would otherwise drive basic values
    // below zero and break the ratio test.
    static void clean(double& v)
    {
        if (std::abs(v) < 1e-13)
            v = 0.0;
    }
};

template <typename T>
struct PhaseOneResult {
    T objective{};
    std::vector<T> x;     // structural variables
    std::vector<T> dual;  // one per row
};

// Phase I of the simplex method for C x = r, x >= 0, r >= 0: minimises the
// sum of artificial variables. Dense tableau with Bland's rule, which keeps
// the heavily degenerate Farkas systems from cycling. In floating point the
// tableau is rebuilt from the original data periodically and before
// accepting optimality.
template <typename T>
PhaseOneResult<T> simplex_phase_one(const std::vector<std::vector<T>>& C, const std::vector<T>& r)
{
    using Tr = ScalarTraits<T>;
    const std::size_t m = C.size();
    const std::size_t k = m ? C[0].size() : 0;
    const std::size_t cols = k + m;

    std::vector<std::vector<T>> orig(m, std::vector<T>(cols + 1, T(0)));
    for (std::size_t i = 0; i < m; ++i) {
        if (Tr::negative(r[i]))
            throw std::invalid_argument("phase one needs a nonnegative right-hand side");
        for (std::size_t j = 0; j < k; ++j)
            orig[i][j] = C[i][j];
        orig[i][k + i] = T(1);
        orig[i][cols] = r[i];
    }
    auto cost_of = [&](std::size_t j) { return j >= k ? T(1) : T(0); };

    std::vector<std::vector<T>> tab = orig;
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i)
        basis[i] = k + i;
    std::vector<T> cost(cols + 1, T(0));  // reduced costs, last entry is -objective

    auto price = [&]() {
        for (std::size_t j = 0; j <= cols; ++j) {
            T v = j < cols ? cost_of(j) : T(0);
            for (std::size_t i = 0; i < m; ++i)
                v -= cost_of(basis[i]) * tab[i][j];
            Tr::clean(v);
            cost[j] = v;
        }
    };

    // tab = B^{-1} orig for the current basis.
    auto refactor = [&]() {
        tab = orig;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t c = basis[i];
            std::size_t p = m;
            for (std::size_t q = i; q < m; ++q)
                if (tab[q][c] != T(0) && (p == m || Tr::magnitude(tab[q][c]) > Tr::magnitude(tab[p][c])))
                    p = q;
            if (p == m)
                throw std::runtime_error("simplex basis became singular");
            std::swap(tab[p], tab[i]);
            const T piv = tab[i][c];
            for (auto& v : tab[i])
                v /= piv;
            for (std::size_t q = 0; q < m; ++q) {
                if (q == i || tab[q][c] == T(0))
                    continue;
                const T f = tab[q][c];
                for (std::size_t j = 0; j <= cols; ++j)
                    tab[q][j] -= f * tab[i][j];
            }
        }
        for (auto& row : tab) {
            for (auto& v : row)
                Tr::clean(v);
            if (Tr::negative(row[cols]) || row[cols] < T(0))
                row[cols] = T(0);
        }
        price();
    };

    price();
    std::size_t since_refactor = 0;
    while (true) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j)
            if (Tr::negative(cost[j])) {
                enter = j;
                break;
            }
        if (enter == cols) {
            if constexpr (!Tr::exact) {
                if (since_refactor > 0) {
                    refactor();
                    since_refactor = 0;
                    continue;
                }
            }
            break;
        }
        std::size_t leave = m;
        T best{};
        for (std::size_t i = 0; i < m; ++i) {
            if (!Tr::pivot_ok(tab[i][enter]))
                continue;
            T ratio = tab[i][cols] / tab[i][enter];
            if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m)
            throw std::runtime_error("phase one is unbounded, which cannot happen");
        const T piv = tab[leave][enter];
        for (std::size_t j = 0; j <= cols; ++j)
            tab[leave][j] /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave)
                continue;
            const T f = tab[i][enter];
            if (f == T(0))
                continue;
            for (std::size_t j = 0; j <= cols; ++j) {
                tab[i][j] -= f * tab[leave][j];
                Tr::clean(tab[i][j]);
            }
        }
        const T f = cost[enter];
        for (std::size_t j = 0; j <= cols; ++j) {
            cost[j] -= f * tab[leave][j];
            Tr::clean(cost[j]);
        }
        basis[leave] = enter;
        if constexpr (!Tr::exact) {
            if (++since_refactor >= 50) {
                refactor();
                since_refactor = 0;
            }
        }
    }

    PhaseOneResult<T> res;
    res.objective = -cost[cols];
    res.x.assign(k, T(0));
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < k)
            res.x[basis[i]] = tab[i][cols];
    res.dual.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        res.dual[i] = T(1) - cost[k + i];
    return res;
}

} // namespace qperc
