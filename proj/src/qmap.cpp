#include "qperc/qmap.hpp"

#include <algorithm>
#include <cmath>

namespace qperc {

namespace {

Eigen::Index side_of(const RVec& w)
{
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(w.size()))));
    if (n * n != w.size())
        throw DimensionMismatch("TPP weight length is not a perfect square");
    return n;
}

CMat gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    CMat G(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = g(rng);
            G(i, j) = cplx(re, g(rng));
        }
    return G;
}

} // namespace

RVec complex_tensor_square(const CVec& x)
{
    const Eigen::Index n = x.size();
    RVec h(n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const cplx c = x[i] * std::conj(x[j]);
            h[n * i + j] = i == j ? c.real() : c.real() + c.imag();
        }
    return h;
}

double tpp_eval(const RVec& w, const RVec& h)
{
    if (w.size() != h.size())
        throw DimensionMismatch("weight and feature lengths differ");
    return w.dot(h);
}

CMat hermitian_from_weights(const RVec& w)
{
    const Eigen::Index n = side_of(w);
    CMat A(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, i) = w[n * i + i];
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double p = w[n * i + j], q = w[n * j + i];
            A(i, j) = cplx((p + q) / 2.0, (p - q) / 2.0);
            A(j, i) = std::conj(A(i, j));
        }
    }
    return A;
}

RVec weights_from_hermitian(const CMat& A)
{
    const Eigen::Index n = A.rows();
    RVec w(n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w[n * i + i] = A(i, i).real();
        for (Eigen::Index j = i + 1; j < n; ++j) {
            w[n * i + j] = A(i, j).real() + A(i, j).imag();
            w[n * j + i] = A(i, j).real() - A(i, j).imag();
        }
    }
    return w;
}

double qnn_eval(const CMat& U, const CVec& x)
{
    const Eigen::Index n = x.size();
    if (U.rows() != 2 * n || U.cols() != 2 * n)
        throw DimensionMismatch("unitary must be 2N x 2N for an N-dimensional input");
    // Output qubit |0> selects the top block: Z = diag(I, -I) on (x, 0).
    CVec y = U.leftCols(n) * x;
    return y.head(n).squaredNorm() - y.tail(n).squaredNorm();
}

double unitarity_error(const CMat& U)
{
    CMat E = U.adjoint() * U - CMat::Identity(U.cols(), U.cols());
    return E.cwiseAbs().maxCoeff();
}

RVec unitary_to_tpp(const CMat& U)
{
    if (U.rows() != U.cols() || U.rows() % 2 != 0)
        throw DimensionMismatch("QNN unitary must be square with even size");
    if (unitarity_error(U) > 1e-9)
        throw InvalidArgument("matrix is not unitary");
    const Eigen::Index n = U.rows() / 2;
    CMat a = U.topLeftCorner(n, n);
    CMat A = 2.0 * a.adjoint() * a - CMat::Identity(n, n);
    return weights_from_hermitian(A);
}

CMat psd_sqrt(const CMat& A)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(A);
    RVec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

UnitaryEmbedding tpp_to_unitary(const RVec& w)
{
    CMat A = hermitian_from_weights(w);
    const Eigen::Index n = A.rows();
    Eigen::SelfAdjointEigenSolver<CMat> es(A, Eigen::EigenvaluesOnly);
    const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
    UnitaryEmbedding out;
    out.scale = std::max(1.0, norm);
    CMat a = psd_sqrt((A / out.scale + CMat::Identity(n, n)) / 2.0);
    out.U = embed_in_unitary(a);
    return out;
}

CMat embed_in_unitary(const CMat& M)
{
    if (M.rows() != M.cols())
        throw DimensionMismatch("embedding needs a square matrix");
    const Eigen::Index k = M.rows();
    Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    RVec d = svd.singularValues();
    if (k > 0 && d.maxCoeff() > 1.0 + 1e-10)
        throw SpectralBoundViolated("singular value " + std::to_string(d.maxCoeff()) + " exceeds 1");
    d = d.cwiseMin(1.0);
    RVec s = (RVec::Ones(k) - d.cwiseAbs2()).cwiseMax(0.0).cwiseSqrt();
    // M = R D V with V = (svd V)^dag.
    CMat S = svd.matrixU() * s.cast<cplx>().asDiagonal() * svd.matrixV().adjoint();
    CMat U(2 * k, 2 * k);
    U.topLeftCorner(k, k) = M;
    U.topRightCorner(k, k) = S;
    U.bottomLeftCorner(k, k) = S;
    U.bottomRightCorner(k, k) = -M;
    return U;
}

CMat haar_random_unitary(Eigen::Index dim, Rng& rng)
{
    return haar_random_isometry(dim, dim, rng);
}

CMat haar_random_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    if (cols > rows || cols < 1)
        throw InvalidArgument("isometry needs 1 <= cols <= rows");
    CMat G = gaussian(rows, cols, rng);
    Eigen::HouseholderQR<CMat> qr(G);
    CMat Q = qr.householderQ() * CMat::Identity(rows, cols);
    const CMat& R = qr.matrixQR();
    for (Eigen::Index j = 0; j < cols; ++j) {
        const cplx r = R(j, j);
        const double mag = std::abs(r);
        if (mag > 0)
            Q.col(j) *= r / mag;
    }
    return Q;
}

} // namespace qperc
