#include "qperc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <thread>

namespace qperc {

namespace {

template <typename Entry>
RMat gram(const std::vector<CVec>& states, Entry entry)
{
    const auto M = static_cast<Eigen::Index>(states.size());
    RMat K(M, M);
    for (Eigen::Index i = 0; i < M; ++i) {
        if (states[static_cast<std::size_t>(i)].size() != states[0].size())
            throw DimensionMismatch("kernel states differ in dimension");
        for (Eigen::Index j = 0; j <= i; ++j)
            K(i, j) = K(j, i) = entry(states[static_cast<std::size_t>(i)].dot(states[static_cast<std::size_t>(j)]));
    }
    return K;
}

} // namespace

RMat quantum_kernel(const std::vector<CVec>& states)
{
    return gram(states, [](cplx v) { return std::norm(v); });
}

RMat linear_kernel(const std::vector<CVec>& states)
{
    return gram(states, [](cplx v) { return v.real(); });
}

double fcn_kernel_level(double a)
{
    a = std::clamp(a, -1.0, 1.0);
    return (std::sqrt(1.0 - a * a) + (std::numbers::pi - std::acos(a)) * a) / std::numbers::pi;
}

RMat fcn_kernel(const RMat& a0, int levels)
{
    if (levels < 1)
        throw InvalidArgument("kernel recursion needs at least one level");
    RMat a = a0;
    for (int l = 0; l < levels; ++l)
        a = a.unaryExpr([](double v) { return fcn_kernel_level(v); });
    return a;
}

RMat quantum_fcn_kernel(const std::vector<CVec>& states, int levels)
{
    return fcn_kernel(quantum_kernel(states).cwiseSqrt(), levels);
}

RVec ridgeless_regression(const RMat& K_train, const RVec& y, const RMat& K_cross)
{
    if (K_train.rows() != K_train.cols() || K_train.rows() != y.size() || K_cross.cols() != K_train.cols())
        throw DimensionMismatch("ridgeless regression shapes disagree");
    // Symmetric K: pseudoinverse through the eigendecomposition.
    Eigen::SelfAdjointEigenSolver<RMat> es(K_train);
    const RVec& lam = es.eigenvalues();
    const double cutoff = 1e-10 * lam.cwiseAbs().maxCoeff();
    RVec proj = es.eigenvectors().transpose() * y;
    for (Eigen::Index k = 0; k < lam.size(); ++k)
        proj[k] = std::abs(lam[k]) > cutoff ? proj[k] / lam[k] : 0.0;
    return K_cross * (es.eigenvectors() * proj);
}

KernelSpectrum integral_operator_spectrum(const RMat& K)
{
    const double M = static_cast<double>(K.rows());
    Eigen::SelfAdjointEigenSolver<RMat> es(K / M);
    KernelSpectrum s;
    s.eigenvalues = es.eigenvalues().reverse();
    s.eigenvectors = es.eigenvectors().rowwise().reverse() * std::sqrt(M);
    const double top = s.eigenvalues.size() ? s.eigenvalues[0] : 0.0;
    for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k)
        if (s.eigenvalues[k] > 1e-10 * top)
            ++s.rank;
    return s;
}

RVec task_model_alignment(const KernelSpectrum& spectrum, const RVec& target)
{
    if (target.size() != spectrum.eigenvectors.rows())
        throw DimensionMismatch("target and eigenvectors live on different input sets");
    const double norm2 = target.squaredNorm();
    if (norm2 == 0.0)
        throw InvalidArgument("zero target");
    const double M = static_cast<double>(target.size());
    RVec overlap = spectrum.eigenvectors.transpose() * target;
    RVec ta(overlap.size());
    double acc = 0.0;
    for (Eigen::Index k = 0; k < overlap.size(); ++k) {
        acc += overlap[k] * overlap[k] / M;
        ta[k] = acc / norm2;
    }
    return ta;
}

std::vector<CurvePoint> learning_curve(const RMat& K, const RVec& target,
                                       const std::vector<std::size_t>& sizes, const CurveOptions& opt)
{
    const auto M = static_cast<std::size_t>(K.rows());
    if (target.size() != K.rows())
        throw DimensionMismatch("target length differs from kernel size");
    if (opt.trials == 0)
        throw InvalidArgument("learning curve needs at least one trial");
    std::vector<CurvePoint> out;
    for (auto m : sizes) {
        if (m == 0 || m > M)
            throw InvalidArgument("training size out of range");
        std::vector<double> mse(opt.trials);
        auto run = [&](std::size_t t) {
            Rng rng = substream(opt.seed, "curve", m * 1000003 + t);
            std::vector<std::size_t> perm(M);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
            std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(m),
                                          perm.begin() + static_cast<std::ptrdiff_t>(std::min(M, m + opt.holdout)));
            if (test.empty())
                test = perm;
            const auto a = static_cast<Eigen::Index>(train.size()), b = static_cast<Eigen::Index>(test.size());
            RMat Kt(a, a), Kc(b, a);
            RVec y(a);
            for (Eigen::Index i = 0; i < a; ++i) {
                y[i] = target[static_cast<Eigen::Index>(train[static_cast<std::size_t>(i)])];
                for (Eigen::Index j = 0; j < a; ++j)
                    Kt(i, j) = K(static_cast<Eigen::Index>(train[static_cast<std::size_t>(i)]),
                                 static_cast<Eigen::Index>(train[static_cast<std::size_t>(j)]));
            }
            for (Eigen::Index i = 0; i < b; ++i)
                for (Eigen::Index j = 0; j < a; ++j)
                    Kc(i, j) = K(static_cast<Eigen::Index>(test[static_cast<std::size_t>(i)]),
                                 static_cast<Eigen::Index>(train[static_cast<std::size_t>(j)]));
            RVec pred = ridgeless_regression(Kt, y, Kc);
            double se = 0.0;
            for (Eigen::Index i = 0; i < b; ++i) {
                const double d = pred[i] - target[static_cast<Eigen::Index>(test[static_cast<std::size_t>(i)])];
                se += d * d;
            }
            mse[t] = se / static_cast<double>(b);
        };
        const unsigned workers = std::max(1u, opt.workers);
        if (workers == 1) {
            for (std::size_t t = 0; t < opt.trials; ++t)
                run(t);
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    for (std::size_t t = w; t < opt.trials; t += workers)
                        run(t);
                });
            for (auto& th : pool)
                th.join();
        }
        CurvePoint p;
        p.m = m;
        const double T = static_cast<double>(opt.trials);
        p.mean_mse = std::accumulate(mse.begin(), mse.end(), 0.0) / T;
        double var = 0.0;
        for (double v : mse)
            var += (v - p.mean_mse) * (v - p.mean_mse);
        p.stderr_mse = opt.trials > 1 ? std::sqrt(var / (T - 1.0) / T) : 0.0;
        out.push_back(p);
    }
    return out;
}

void write_spectrum_csv(std::ostream& os, const KernelSpectrum& spectrum, const RVec& ta)
{
    os << "k,eigenvalue,ta_cumulative\n" << std::setprecision(17);
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        os << k + 1 << ',' << spectrum.eigenvalues[static_cast<Eigen::Index>(k)] << ',';
        if (static_cast<Eigen::Index>(k) < ta.size())
            os << ta[static_cast<Eigen::Index>(k)];
        os << '\n';
    }
}

void write_learning_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve)
{
    os << "m,mean_mse,stderr\n" << std::setprecision(17);
    for (const auto& p : curve)
        os << p.m << ',' << p.mean_mse << ',' << p.stderr_mse << '\n';
}

} // namespace qperc
