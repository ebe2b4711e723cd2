#include "qperc/express.hpp"

#include <algorithm>
#include <cmath>

#include "qperc/qmap.hpp"
#include "qperc/simplex.hpp"

namespace qperc {

namespace {

double sign_of(int label) { return label ? 1.0 : -1.0; }

double rhs_of(int label, ThresholdRule rule)
{
    return (label || rule == ThresholdRule::Strict) ? 1.0 : 0.0;
}

// Fills margin and checks the witness outputs g against the rule.
bool check_outputs(const RVec& g, const std::vector<int>& labels, ThresholdRule rule,
                   double& margin)
{
    margin = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double sg = sign_of(labels[i]) * g[static_cast<Eigen::Index>(i)];
        margin = std::min(margin, sg);
        if (labels[i] || rule == ThresholdRule::Strict)
            ok = ok && sg > 0.0;
        else
            ok = ok && sg >= -1e-9;  // outputs that are zero up to rounding
    }
    return ok;
}

mpz_class floor_div(const mpz_class& a, const mpz_class& b)
{
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

} // namespace

std::vector<int> labels_for(const EncodedDataset& ds, const BooleanFunction& f)
{
    if (f.size() != (std::size_t{1} << ds.n))
        throw DimensionMismatch("function and dataset have different input dimension");
    std::vector<int> y(ds.size());
    for (std::size_t r = 0; r < ds.size(); ++r)
        y[r] = f[ds.indices[r]];
    return y;
}

mpq_class rationalize(double v, bool* clean, long max_den, double tol)
{
    mpq_class exact(v);
    const bool neg = exact < 0;
    mpq_class q = neg ? mpq_class(-exact) : exact;
    mpz_class n = q.get_num(), d = q.get_den();
    mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    const mpz_class bound = max_den;
    bool finished = false;
    while (true) {
        mpz_class a = floor_div(n, d);
        mpz_class q2 = q0 + a * q1;
        if (q2 > bound)
            break;
        mpz_class p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        mpz_class r = n - a * d;
        n = d;
        d = r;
        if (d == 0) {
            finished = true;
            break;
        }
    }
    mpq_class best;
    if (finished) {
        best = mpq_class(p1, q1);
    } else {
        mpz_class k = floor_div(bound - q0, q1);
        mpq_class b1(p0 + k * p1, q0 + k * q1), b2(p1, q1);
        b1.canonicalize();
        b2.canonicalize();
        mpq_class e1 = b1 - q, e2 = b2 - q;
        best = abs(e2) <= abs(e1) ? b2 : b1;
    }
    best.canonicalize();
    if (neg)
        best = -best;
    const bool ok = std::abs(mpq_class(best - exact).get_d()) < tol;
    if (clean)
        *clean = ok;
    return ok ? best : exact;
}

GramFactor::GramFactor(const RMat& gram, bool bias) : with_bias(bias)
{
    const Eigen::Index m = gram.rows();
    K = gram;
    if (with_bias)
        K.array() += 1.0;
    Eigen::SelfAdjointEigenSolver<RMat> es(K);
    const RVec& ev = es.eigenvalues();
    const double top = m ? ev.cwiseAbs().maxCoeff() : 0.0;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = m - 1; i >= 0; --i)
        if (ev[i] > 1e-10 * top && ev[i] > 0)
            keep.push_back(i);
    const auto r = static_cast<Eigen::Index>(keep.size());
    F.resize(m, r);
    to_coef.resize(m, r);
    for (Eigen::Index c = 0; c < r; ++c) {
        const double lam = ev[keep[static_cast<std::size_t>(c)]];
        F.col(c) = es.eigenvectors().col(keep[static_cast<std::size_t>(c)]) * std::sqrt(lam);
        to_coef.col(c) = es.eigenvectors().col(keep[static_cast<std::size_t>(c)]) / std::sqrt(lam);
    }
}

GramSeparation separable_gram(const GramFactor& g, const std::vector<int>& labels,
                              ThresholdRule rule)
{
    const Eigen::Index m = g.F.rows(), r = g.F.cols();
    if (static_cast<std::size_t>(m) != labels.size())
        throw DimensionMismatch("label count differs from Gram size");
    if (m == 0)
        throw InvalidArgument("empty dataset");
    // Farkas alternative of  s_i f_i . v >= b_i:  lambda >= 0, A^T lambda = 0, b^T lambda = 1.
    std::vector<std::vector<double>> C(static_cast<std::size_t>(r + 1),
                                       std::vector<double>(static_cast<std::size_t>(m)));
    for (Eigen::Index i = 0; i < m; ++i) {
        const double s = sign_of(labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index c = 0; c < r; ++c)
            C[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] = s * g.F(i, c);
        C[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] =
            rhs_of(labels[static_cast<std::size_t>(i)], rule);
    }
    std::vector<double> rhs(static_cast<std::size_t>(r + 1), 0.0);
    rhs.back() = 1.0;
    auto res = simplex_phase_one(C, rhs);

    GramSeparation out;
    if (res.objective <= 1e-10)
        return out;
    const double t = res.dual.back();
    RVec v(r);
    for (Eigen::Index c = 0; c < r; ++c)
        v[c] = -res.dual[static_cast<std::size_t>(c)] / t;
    out.coeffs = g.to_coef * v;
    RVec gout = g.K * out.coeffs;
    double margin = 0;
    if (!check_outputs(gout, labels, rule, margin))
        return out;
    out.feasible = true;
    out.bias = g.with_bias ? -out.coeffs.sum() : 0.0;
    return out;
}

ExactSeparation separable_exact(const std::vector<RVec>& features, const std::vector<int>& labels,
                                bool with_bias, ThresholdRule rule)
{
    const std::size_t m = features.size();
    if (m == 0)
        throw InvalidArgument("empty dataset");
    const std::size_t d = static_cast<std::size_t>(features[0].size()) + (with_bias ? 1 : 0);
    ExactSeparation out;
    std::vector<std::vector<mpq_class>> A(m, std::vector<mpq_class>(d));
    for (std::size_t i = 0; i < m; ++i) {
        const int s = labels[i] ? 1 : -1;
        for (Eigen::Index c = 0; c < features[i].size(); ++c) {
            bool clean = true;
            A[i][static_cast<std::size_t>(c)] = s * rationalize(features[i][c], &clean);
            out.clean = out.clean && clean;
        }
        if (with_bias)
            A[i][d - 1] = -s;
    }

    // Independent columns of A span the same space of outputs A v.
    std::vector<std::size_t> pivots;
    {
        auto E = A;
        std::size_t row = 0;
        for (std::size_t c = 0; c < d && row < m; ++c) {
            std::size_t p = row;
            while (p < m && E[p][c] == 0)
                ++p;
            if (p == m)
                continue;
            std::swap(E[p], E[row]);
            for (std::size_t i = row + 1; i < m; ++i) {
                if (E[i][c] == 0)
                    continue;
                mpq_class f = E[i][c] / E[row][c];
                for (std::size_t j = c; j < d; ++j)
                    E[i][j] -= f * E[row][j];
            }
            pivots.push_back(c);
            ++row;
        }
    }

    const std::size_t r = pivots.size();
    std::vector<std::vector<mpq_class>> C(r + 1, std::vector<mpq_class>(m));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t c = 0; c < r; ++c)
            C[c][i] = A[i][pivots[c]];
        C[r][i] = (labels[i] || rule == ThresholdRule::Strict) ? 1 : 0;
    }
    std::vector<mpq_class> rhs(r + 1, mpq_class(0));
    rhs.back() = 1;
    auto res = simplex_phase_one(C, rhs);
    out.witness = RVec::Zero(static_cast<Eigen::Index>(d));
    if (res.objective == 0)
        return out;
    out.feasible = true;
    const mpq_class t = res.dual.back();
    for (std::size_t c = 0; c < r; ++c)
        out.witness[static_cast<Eigen::Index>(pivots[c])] = mpq_class(-res.dual[c] / t).get_d();
    return out;
}

ExpressibilityVerdict separable(const std::vector<RVec>& features, const std::vector<int>& labels,
                                const ExpressOptions& opt)
{
    if (features.empty())
        throw InvalidArgument("empty dataset");
    if (features.size() != labels.size())
        throw DimensionMismatch("feature and label counts differ");
    const auto m = static_cast<Eigen::Index>(features.size());
    const Eigen::Index d = features[0].size();
    RMat H(m, d);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (features[static_cast<std::size_t>(i)].size() != d)
            throw DimensionMismatch("feature vectors differ in length");
        H.row(i) = features[static_cast<std::size_t>(i)].transpose();
    }

    ExpressibilityVerdict v;
    RVec w;
    double z = 0.0;
    bool rational = features.size() <= opt.certify_up_to;
    for (std::size_t i = 0; rational && i < features.size(); ++i)
        for (Eigen::Index c = 0; rational && c < d; ++c)
            rationalize(features[i][c], &rational);
    if (rational) {
        auto ex = separable_exact(features, labels, opt.with_bias, opt.rule);
        v.expressible = ex.feasible;
        v.certified = ex.clean;
        if (!ex.feasible)
            return v;
        w = ex.witness.head(d);
        z = opt.with_bias ? ex.witness[d] : 0.0;
    } else {
        GramFactor gf(H * H.transpose(), opt.with_bias);
        auto gs = separable_gram(gf, labels, opt.rule);
        v.expressible = gs.feasible;
        if (!gs.feasible)
            return v;
        w = H.transpose() * gs.coeffs;
        z = gs.bias;
    }
    RVec g = H * w - RVec::Constant(m, z);
    double margin = 0;
    check_outputs(g, labels, opt.rule, margin);
    v.witness = w;
    v.bias = z;
    v.margin = margin;
    return v;
}

namespace {

std::vector<RVec> feature_rows(const EncodedDataset& ds, FeatureMap map)
{
    std::vector<RVec> rows;
    rows.reserve(ds.size());
    for (const auto& s : ds.states)
        rows.push_back(map == FeatureMap::Tensor ? complex_tensor_square(s) : RVec(s.real()));
    return rows;
}

RMat gram_of(const EncodedDataset& ds, FeatureMap map)
{
    const auto m = static_cast<Eigen::Index>(ds.size());
    CMat X(static_cast<Eigen::Index>(ds.dim()), m);
    for (Eigen::Index i = 0; i < m; ++i)
        X.col(i) = ds.states[static_cast<std::size_t>(i)];
    CMat G = X.adjoint() * X;
    // (x (*) x).(y (*) y) = |<x|y>|^2; the linear map uses real inputs only.
    return map == FeatureMap::Tensor ? RMat(G.cwiseAbs2()) : RMat(G.real());
}

ExpressibilityVerdict from_gram(const EncodedDataset& ds, const GramFactor& gf,
                                const std::vector<int>& labels, FeatureMap map,
                                const ExpressOptions& opt)
{
    ExpressibilityVerdict v;
    auto gs = separable_gram(gf, labels, opt.rule);
    v.expressible = gs.feasible;
    if (!gs.feasible)
        return v;
    std::vector<RVec> rows = feature_rows(ds, map);
    RVec w = RVec::Zero(rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        w += gs.coeffs[static_cast<Eigen::Index>(i)] * rows[i];
    RVec g(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        g[static_cast<Eigen::Index>(i)] = w.dot(rows[i]) - gs.bias;
    double margin = 0;
    check_outputs(g, labels, opt.rule, margin);
    v.witness = w;
    v.bias = gs.bias;
    v.margin = margin;
    return v;
}

ExpressibilityVerdict decide(const EncodedDataset& ds, const BooleanFunction& f, FeatureMap map,
                             const ExpressOptions& opt)
{
    if (ds.size() == 0)
        throw InvalidArgument("empty dataset");
    auto labels = labels_for(ds, f);
    if (ds.size() <= opt.certify_up_to)
        return separable(feature_rows(ds, map), labels, opt);
    GramFactor gf(gram_of(ds, map), opt.with_bias);
    return from_gram(ds, gf, labels, map, opt);
}

} // namespace

ExpressibilityVerdict is_expressible(const EncodedDataset& ds, const BooleanFunction& f,
                                     const ExpressOptions& opt)
{
    return decide(ds, f, FeatureMap::Tensor, opt);
}

ExpressibilityVerdict perceptron_expressible(const EncodedDataset& ds, const BooleanFunction& f,
                                             const ExpressOptions& opt)
{
    return decide(ds, f, FeatureMap::Linear, opt);
}

CountResult count_expressible(const EncodedDataset& ds, const TargetSuite& suite, FeatureMap map,
                              const ExpressOptions& opt)
{
    if (suite.n != ds.n)
        throw DimensionMismatch("suite and dataset have different n");
    CountResult out;
    std::optional<GramFactor> gf;
    if (ds.size() > opt.certify_up_to)
        gf.emplace(gram_of(ds, map), opt.with_bias);
    for (const auto& e : suite.functions) {
        ExpressibilityVerdict v = gf ? from_gram(ds, *gf, labels_for(ds, e.f), map, opt)
                                     : decide(ds, e.f, map, opt);
        out.count += v.expressible ? 1 : 0;
        out.verdicts.push_back(std::move(v));
    }
    return out;
}

mpz_class cover_count(unsigned long N, unsigned long K)
{
    if (N == 0 || K == 0)
        throw InvalidArgument("cover_count needs N, K >= 1");
    mpz_class out;
    if (K >= N) {
        mpz_ui_pow_ui(out.get_mpz_t(), 2, N);
        return out;
    }
    mpz_class sum = 0, binom;
    for (unsigned long k = 0; k < K; ++k) {
        mpz_bin_uiui(binom.get_mpz_t(), N - 1, k);
        sum += binom;
    }
    return 2 * sum;
}

} // namespace qperc
