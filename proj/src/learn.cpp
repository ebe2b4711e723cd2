#include "qperc/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qperc/qmap.hpp"

namespace qperc {

namespace {

double target(int label) { return label ? 1.0 : -1.0; }

// Shared mini-batch loop. `step` applies one update on a batch of training
// positions; `evaluate` returns (loss, error) on the full training set.
template <typename Step, typename Eval>
History run_sgd(std::size_t m, const TrainConfig& cfg, Rng& rng, Step&& step, Eval&& evaluate)
{
    History h;
    const std::size_t batch = cfg.batch_for(m);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < m; start += batch) {
            std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(std::min(m, start + batch)));
            step(idx);
        }
        auto [loss, err] = evaluate();
        h.loss.push_back(loss);
        h.train_error = err;
        h.epochs = epoch + 1;
        if (err == 0.0 && h.fit_epoch == 0)
            h.fit_epoch = h.epochs;
        if (err == 0.0 && h.loss.size() > cfg.patience &&
            h.loss[h.loss.size() - 1 - cfg.patience] - loss < cfg.tolerance)
            break;
    }
    h.converged = h.train_error == 0.0;
    return h;
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

double largest_eigenvalue(const RMat& K)
{
    Eigen::SelfAdjointEigenSolver<RMat> es(K, Eigen::EigenvaluesOnly);
    return std::max(es.eigenvalues().maxCoeff(), 1e-12);
}

} // namespace

std::size_t TrainConfig::batch_for(std::size_t train_size) const
{
    std::size_t b = batch_size ? batch_size
                               : static_cast<std::size_t>(std::llround(batch_fraction * static_cast<double>(train_size)));
    return std::clamp<std::size_t>(b, 1, std::max<std::size_t>(train_size, 1));
}

Sample gather(const EncodedDataset& ds, const BooleanFunction& f, const std::vector<std::size_t>& inputs)
{
    Sample s;
    for (auto i : inputs) {
        const auto pos = ds.position(i);
        if (pos < 0)
            continue;
        s.x.push_back(ds.states[static_cast<std::size_t>(pos)]);
        s.y.push_back(f[i]);
    }
    return s;
}

double TppModel::output(const CVec& x) const { return tpp_eval(w, complex_tensor_square(x)); }

double PerceptronModel::output(const CVec& x) const { return w.dot(x.real()) + b; }

double FcnModel::output(const CVec& x) const
{
    RVec hidden = (W1 * x.real() + b1).cwiseMax(0.0);
    return w2.dot(hidden) + b2;
}

double DqnnModel::output(const CVec& x) const { return dqnn_forward(*this, x); }

TppModel train_tpp(const Sample& train, const TrainConfig& cfg)
{
    const std::size_t m = train.size();
    if (m == 0)
        throw InvalidArgument("empty training set");
    // SGD from w = 0 keeps w in the span of the training features, so it runs
    // on coefficients alpha with w = sum_j alpha_j h_j and the kernel |<x_i|x_j>|^2.
    const auto M = static_cast<Eigen::Index>(m);
    RMat K(M, M);
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index j = i; j < M; ++j)
            K(i, j) = K(j, i) = std::norm(train.x[static_cast<std::size_t>(i)].dot(train.x[static_cast<std::size_t>(j)]));
    RVec y(M);
    for (Eigen::Index i = 0; i < M; ++i)
        y[i] = target(train.y[static_cast<std::size_t>(i)]);

    const double batch = static_cast<double>(cfg.batch_for(m));
    const double lr = cfg.learning_rate > 0 ? cfg.learning_rate : batch / (2.0 * largest_eigenvalue(K));
    RVec alpha = RVec::Zero(M);
    Rng rng = substream(cfg.seed, "train.tpp");

    auto step = [&](const std::vector<std::size_t>& idx) {
        RVec delta = RVec::Zero(M);
        for (auto i : idx) {
            const auto r = static_cast<Eigen::Index>(i);
            delta[r] = K.row(r).dot(alpha) - y[r];
        }
        alpha -= (lr * 2.0 / static_cast<double>(idx.size())) * delta;
    };
    auto evaluate = [&]() {
        RVec g = K * alpha;
        double loss = (g - y).squaredNorm() / static_cast<double>(M);
        std::size_t wrong = 0;
        for (Eigen::Index i = 0; i < M; ++i)
            wrong += ((g[i] > 0) != (y[i] > 0)) ? 1 : 0;
        return std::pair{loss, static_cast<double>(wrong) / static_cast<double>(M)};
    };

    TppModel model;
    model.history = run_sgd(m, cfg, rng, step, evaluate);
    model.w = RVec::Zero(train.x[0].size() * train.x[0].size());
    for (Eigen::Index j = 0; j < M; ++j)
        model.w += alpha[j] * complex_tensor_square(train.x[static_cast<std::size_t>(j)]);
    if (cfg.rescale)
        model.w /= tpp_to_unitary(model.w).scale;
    return model;
}

PerceptronModel train_perceptron(const Sample& train, const TrainConfig& cfg)
{
    const std::size_t m = train.size();
    if (m == 0)
        throw InvalidArgument("empty training set");
    const auto M = static_cast<Eigen::Index>(m);
    const Eigen::Index d = train.x[0].size();
    RMat X(M, d + 1);
    RVec y(M);
    for (Eigen::Index i = 0; i < M; ++i) {
        X.row(i).head(d) = train.x[static_cast<std::size_t>(i)].real().transpose();
        X(i, d) = 1.0;
        y[i] = target(train.y[static_cast<std::size_t>(i)]);
    }
    const double batch = static_cast<double>(cfg.batch_for(m));
    const double lr = cfg.learning_rate > 0 ? cfg.learning_rate
                                             : batch / (2.0 * largest_eigenvalue(X * X.transpose()));
    RVec w = RVec::Zero(d + 1);
    Rng rng = substream(cfg.seed, "train.perceptron");
    auto step = [&](const std::vector<std::size_t>& idx) {
        RVec grad = RVec::Zero(d + 1);
        for (auto i : idx) {
            const auto r = static_cast<Eigen::Index>(i);
            grad += (X.row(r).dot(w) - y[r]) * X.row(r).transpose();
        }
        w -= (lr * 2.0 / static_cast<double>(idx.size())) * grad;
    };
    auto evaluate = [&]() {
        RVec g = X * w;
        std::size_t wrong = 0;
        for (Eigen::Index i = 0; i < M; ++i)
            wrong += ((g[i] > 0) != (y[i] > 0)) ? 1 : 0;
        return std::pair{(g - y).squaredNorm() / static_cast<double>(M), static_cast<double>(wrong) / static_cast<double>(M)};
    };
    PerceptronModel model;
    model.history = run_sgd(m, cfg, rng, step, evaluate);
    model.w = w.head(d);
    model.b = w[d];
    return model;
}

FcnModel train_fcn(const Sample& train, const TrainConfig& cfg, std::size_t width)
{
    const std::size_t m = train.size();
    if (m == 0 || width == 0)
        throw InvalidArgument("empty training set or zero width");
    const auto M = static_cast<Eigen::Index>(m);
    const Eigen::Index d = train.x[0].size();
    const auto H = static_cast<Eigen::Index>(width);
    RMat X(d, M);
    RVec y(M);
    for (Eigen::Index i = 0; i < M; ++i) {
        X.col(i) = train.x[static_cast<std::size_t>(i)].real();
        y[i] = target(train.y[static_cast<std::size_t>(i)]);
    }

    Rng rng = substream(cfg.seed, "train.fcn");
    FcnModel net;
    std::uniform_real_distribution<double> u1(-1.0 / std::sqrt(static_cast<double>(d)), 1.0 / std::sqrt(static_cast<double>(d)));
    std::uniform_real_distribution<double> u2(-1.0 / std::sqrt(static_cast<double>(H)), 1.0 / std::sqrt(static_cast<double>(H)));
    net.W1.resize(H, d);
    for (Eigen::Index i = 0; i < H; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            net.W1(i, j) = u1(rng);
    net.b1 = RVec::Zero(H);
    net.w2.resize(H);
    for (Eigen::Index i = 0; i < H; ++i)
        net.w2[i] = u2(rng);
    net.b2 = 0.0;
    const double lr = cfg.learning_rate > 0 ? cfg.learning_rate : 0.05;

    auto step = [&](const std::vector<std::size_t>& idx) {
        RMat gW1 = RMat::Zero(H, d);
        RVec gb1 = RVec::Zero(H), gw2 = RVec::Zero(H);
        double gb2 = 0;
        for (auto i : idx) {
            const auto c = static_cast<Eigen::Index>(i);
            RVec pre = net.W1 * X.col(c) + net.b1;
            RVec act = pre.cwiseMax(0.0);
            const double err = 2.0 * (net.w2.dot(act) + net.b2 - y[c]);
            gw2 += err * act;
            gb2 += err;
            RVec back = (err * net.w2).cwiseProduct((pre.array() > 0).cast<double>().matrix());
            gW1 += back * X.col(c).transpose();
            gb1 += back;
        }
        const double s = lr / static_cast<double>(idx.size());
        net.W1 -= s * gW1;
        net.b1 -= s * gb1;
        net.w2 -= s * gw2;
        net.b2 -= s * gb2;
    };
    auto evaluate = [&]() {
        RMat act = ((net.W1 * X).colwise() + net.b1).cwiseMax(0.0);
        RVec g = (act.transpose() * net.w2).array() + net.b2;
        std::size_t wrong = 0;
        for (Eigen::Index i = 0; i < M; ++i)
            wrong += ((g[i] > 0) != (y[i] > 0)) ? 1 : 0;
        return std::pair{(g - y).squaredNorm() / static_cast<double>(M), static_cast<double>(wrong) / static_cast<double>(M)};
    };
    net.history = run_sgd(m, cfg, rng, step, evaluate);
    return net;
}

RVec dqnn_readouts(const DqnnModel& model, const CVec& x)
{
    RVec z(static_cast<Eigen::Index>(model.readouts()));
    for (std::size_t k = 0; k < model.readouts(); ++k)
        z[static_cast<Eigen::Index>(k)] = qnn_eval(model.layer1[k], x);
    return z;
}

namespace {

std::size_t second_layer_dim(DqnnVariant v, std::size_t p)
{
    return v == DqnnVariant::Alpha ? next_pow2(p) : (std::size_t{1} << p);
}

// Re-encoding of thresholded readouts s in {0,1}^p.
RVec reencode(DqnnVariant v, const std::vector<std::uint8_t>& s)
{
    const std::size_t p = s.size();
    RVec psi = RVec::Zero(static_cast<Eigen::Index>(second_layer_dim(v, p)));
    if (v == DqnnVariant::Alpha) {
        double count = 0;
        for (std::size_t k = 0; k < p; ++k)
            count += s[k];
        if (count == 0) {
            psi[0] = 1.0;  // fixed state for an all-zero intermediate
            return psi;
        }
        for (std::size_t k = 0; k < p; ++k)
            psi[static_cast<Eigen::Index>(k)] = s[k] / std::sqrt(count);
    } else {
        psi[static_cast<Eigen::Index>(input_to_index(s))] = 1.0;
    }
    return psi;
}

} // namespace

CVec dqnn_intermediate(const DqnnModel& model, const CVec& x)
{
    RVec z = dqnn_readouts(model, x);
    std::vector<std::uint8_t> s(model.readouts());
    for (std::size_t k = 0; k < s.size(); ++k)
        s[k] = z[static_cast<Eigen::Index>(k)] + model.biases[static_cast<Eigen::Index>(k)] > 0.0 ? 1 : 0;
    return reencode(model.variant, s).cast<cplx>();
}

double dqnn_forward(const DqnnModel& model, const CVec& x)
{
    if (model.biases.size() != static_cast<Eigen::Index>(model.readouts()))
        throw DimensionMismatch("one bias per readout is required");
    return qnn_eval(model.layer2, dqnn_intermediate(model, x));
}

DqnnTrained train_dqnn(const Sample& train, const TrainConfig& cfg, std::size_t p, DqnnVariant variant)
{
    const std::size_t m = train.size();
    if (m == 0 || p == 0)
        throw InvalidArgument("empty training set or no readouts");
    if (variant == DqnnVariant::Beta && p > 16)
        throw InvalidArgument("basis re-encoding supports at most 16 readouts");
    const Eigen::Index n = train.x[0].size();
    const auto P = static_cast<Eigen::Index>(p);
    const auto D = static_cast<Eigen::Index>(second_layer_dim(variant, p));
    constexpr double temperature = 0.1;

    // Each layer is trained in its TPP form and mapped to unitaries at the end.
    Rng rng = substream(cfg.seed, "train.dqnn");
    RMat W1(P, n * n);
    for (Eigen::Index k = 0; k < P; ++k)
        W1.row(k) = unitary_to_tpp(haar_random_unitary(2 * n, rng)).transpose();
    RVec b1 = RVec::Zero(P);
    RVec w2 = unitary_to_tpp(haar_random_unitary(2 * D, rng));

    std::vector<RVec> feats(m);
    RVec y(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        feats[i] = complex_tensor_square(train.x[i]);
        y[static_cast<Eigen::Index>(i)] = target(train.y[i]);
    }
    const double lr = cfg.learning_rate > 0 ? cfg.learning_rate : 0.1;

    struct Pass {
        RVec u;
        std::vector<std::uint8_t> s;
        RVec psi;
        double g;
    };
    auto forward = [&](std::size_t i) {
        Pass f;
        f.u = W1 * feats[i] + b1;
        f.s.resize(p);
        for (std::size_t k = 0; k < p; ++k)
            f.s[k] = f.u[static_cast<Eigen::Index>(k)] > 0.0 ? 1 : 0;
        f.psi = reencode(variant, f.s);
        Eigen::Map<const RMat> A2(w2.data(), D, D);  // w2[D*i + j] at (j, i)
        f.g = f.psi.dot(A2.transpose() * f.psi);
        return f;
    };

    auto step = [&](const std::vector<std::size_t>& idx) {
        RMat gW1 = RMat::Zero(P, n * n);
        RVec gb1 = RVec::Zero(P), gw2 = RVec::Zero(D * D);
        Eigen::Map<const RMat> A2t(w2.data(), D, D);
        RMat Asym = A2t + A2t.transpose();
        for (auto i : idx) {
            Pass f = forward(i);
            const double dg = 2.0 * (f.g - y[static_cast<Eigen::Index>(i)]);
            for (Eigen::Index r = 0; r < D; ++r)
                if (f.psi[r] != 0.0)
                    for (Eigen::Index c = 0; c < D; ++c)
                        gw2[D * r + c] += dg * f.psi[r] * f.psi[c];
            RVec dpsi = Asym * f.psi;  // dg/dpsi
            RVec ds(P);
            if (variant == DqnnVariant::Alpha) {
                double count = 0;
                for (auto b : f.s)
                    count += b;
                if (count == 0)
                    continue;
                RVec proj = (dpsi - f.psi * f.psi.dot(dpsi)) / std::sqrt(count);
                ds = proj.head(P);
            } else {
                const std::size_t idx0 = input_to_index(f.s);
                for (std::size_t k = 0; k < p; ++k) {
                    const std::size_t bit = std::size_t{1} << (p - 1 - k);
                    ds[static_cast<Eigen::Index>(k)] = dpsi[static_cast<Eigen::Index>(idx0 | bit)] -
                                                       dpsi[static_cast<Eigen::Index>(idx0 & ~bit)];
                }
            }
            for (Eigen::Index k = 0; k < P; ++k) {
                const double sg = sigmoid(f.u[k] / temperature);
                const double du = dg * ds[k] * sg * (1.0 - sg) / temperature;
                if (du == 0.0)
                    continue;
                gW1.row(k) += du * feats[i].transpose();
                gb1[k] += du;
            }
        }
        const double s = lr / static_cast<double>(idx.size());
        W1 -= s * gW1;
        b1 -= s * gb1;
        w2 -= s * gw2;
    };
    auto evaluate = [&]() {
        double loss = 0;
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < m; ++i) {
            Pass f = forward(i);
            const double t = y[static_cast<Eigen::Index>(i)];
            loss += (f.g - t) * (f.g - t);
            wrong += ((f.g > 0) != (t > 0)) ? 1 : 0;
        }
        return std::pair{loss / static_cast<double>(m), static_cast<double>(wrong) / static_cast<double>(m)};
    };

    DqnnTrained out;
    out.history = run_sgd(m, cfg, rng, step, evaluate);
    out.model.variant = variant;
    out.model.biases.resize(P);
    for (Eigen::Index k = 0; k < P; ++k) {
        auto emb = tpp_to_unitary(W1.row(k).transpose());
        out.model.layer1.push_back(std::move(emb.U));
        out.model.biases[k] = b1[k] / emb.scale;
    }
    out.model.layer2 = tpp_to_unitary(w2).U;
    return out;
}

CMat multi_readout_unitary(const std::vector<RVec>& weights)
{
    if (weights.empty())
        throw InvalidArgument("at least one readout is required");
    const Eigen::Index n = weights[0].size();
    const std::size_t d = weights.size();
    const Eigen::Index dim = (Eigen::Index{1} << d) * n;
    CMat U = CMat::Identity(dim, dim);
    for (std::size_t k = 0; k < d; ++k) {
        const RVec& w = weights[k];
        if (w.size() != n)
            throw DimensionMismatch("all readouts need the same data dimension");
        if (w.cwiseAbs().maxCoeff() > 1.0 + 1e-12)
            throw InvalidArgument("readout weights must satisfy |w| <= 1");
        RVec plus = ((RVec::Ones(n) + w).cwiseMax(0.0) / 2.0).cwiseSqrt();
        RVec minus = ((RVec::Ones(n) - w).cwiseMax(0.0) / 2.0).cwiseSqrt();
        // Block rotation on readout k, diagonal in the data register.
        const Eigen::Index bit = (Eigen::Index{1} << (d - 1 - k)) * n;
        CMat Uk = CMat::Zero(dim, dim);
        for (Eigen::Index r = 0; r < (Eigen::Index{1} << d); ++r) {
            const Eigen::Index base = r * n;
            if (base & bit)
                continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                const Eigen::Index i0 = base + j, i1 = base + bit + j;
                Uk(i0, i0) = plus[j];
                Uk(i0, i1) = -minus[j];
                Uk(i1, i0) = minus[j];
                Uk(i1, i1) = plus[j];
            }
        }
        U = Uk * U;
    }
    return U;
}

double readout_expectation(const CMat& U, const CVec& x, std::size_t k, std::size_t d)
{
    const Eigen::Index n = x.size();
    if (U.rows() != (Eigen::Index{1} << d) * n)
        throw DimensionMismatch("unitary size does not match readouts and data");
    CVec psi = U.leftCols(n) * x;
    double z = 0;
    const Eigen::Index bit = Eigen::Index{1} << (d - 1 - k);
    for (Eigen::Index i = 0; i < psi.size(); ++i)
        z += std::norm(psi[i]) * (((i / n) & bit) ? -1.0 : 1.0);
    return z;
}

DqnnModel construct_universal_dqnn(const BooleanFunction& f, DqnnVariant variant)
{
    const int n = f.n;
    if (n < 1 || n > 8)
        throw InvalidArgument("universal construction supports 1 <= n <= 8");
    const auto N = static_cast<Eigen::Index>(next_pow2(static_cast<std::size_t>(n)));
    DqnnModel model;
    model.variant = variant;
    auto readout_from = [&](const CMat& A) { return tpp_to_unitary(weights_from_hermitian(A)).U; };

    if (variant == DqnnVariant::Beta) {
        // Readout i reports |x_i|^2 = b_i / |b|, which is 0 or at least 1/n.
        model.biases = RVec::Constant(n, -1.0 / (2.0 * n));
        for (int i = 0; i < n; ++i) {
            CMat A = CMat::Zero(N, N);
            A(i, i) = 1.0;
            model.layer1.push_back(readout_from(A));
        }
    } else {
        // Readout k peaks at 1 exactly on the input with bit pattern k and is
        // at most 1 - 1/n elsewhere.
        const std::size_t p = std::size_t{1} << n;
        model.biases = RVec::Constant(static_cast<Eigen::Index>(p), -(1.0 - 1.0 / (2.0 * n)));
        for (std::size_t k = 0; k < p; ++k) {
            auto bits = index_to_input(k, n);
            const double size = static_cast<double>(std::count(bits.begin(), bits.end(), 1));
            CMat A = CMat::Zero(N, N);
            for (Eigen::Index i = 0; i < N; ++i) {
                const bool in = i < n && bits[static_cast<std::size_t>(i)];
                if (!in) {
                    A(i, i) = -1.0;
                    continue;
                }
                for (Eigen::Index j = 0; j < n; ++j)
                    if (bits[static_cast<std::size_t>(j)])
                        A(i, j) = 1.0 / size;
            }
            model.layer1.push_back(readout_from(A));
        }
    }
    // Intermediate state is the basis state of the input index in both cases.
    const auto D = static_cast<Eigen::Index>(f.size());
    CMat a = CMat::Zero(D, D);
    for (Eigen::Index i = 0; i < D; ++i)
        a(i, i) = f[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
    model.layer2 = embed_in_unitary(a);
    return model;
}

} // namespace qperc
