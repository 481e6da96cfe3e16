#include "renal/embedding.hpp"

#include "renal/errors.hpp"
#include "renal/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

namespace renal {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd sigmoid(const VectorXd& x) {
    return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

VectorXd softplus(const VectorXd& x) {
    // log1p(exp(x)) with the large-x branch kept linear for stability.
    return x.array().unaryExpr([](double v) {
        return v > 30.0 ? v : std::log1p(std::exp(v));
    }).matrix();
}

// Trainable parameters in a fixed order; decay_raw participates only for
// event models.
std::vector<std::pair<double*, Index>> param_spans(EmbeddingModel& m) {
    std::vector<std::pair<double*, Index>> v = {
        {m.w_update.data(), m.w_update.size()}, {m.u_update.data(), m.u_update.size()},
        {m.b_update.data(), m.b_update.size()}, {m.w_reset.data(), m.w_reset.size()},
        {m.u_reset.data(), m.u_reset.size()},   {m.b_reset.data(), m.b_reset.size()},
        {m.w_cand.data(), m.w_cand.size()},     {m.u_cand.data(), m.u_cand.size()},
        {m.b_cand.data(), m.b_cand.size()},
    };
    if (m.kind == SeriesKind::event) {
        v.push_back({m.decay_raw.data(), m.decay_raw.size()});
    }
    v.push_back({m.w_out.data(), m.w_out.size()});
    v.push_back({m.b_out.data(), m.b_out.size()});
    return v;
}

Index total_params(EmbeddingModel& m) {
    Index n = 0;
    for (const auto& [ptr, len] : param_spans(m)) n += len;
    return n;
}

// Gradient accumulator with the same shapes as the model's parameters.
struct Grads {
    MatrixXd w_update, u_update, w_reset, u_reset, w_cand, u_cand, w_out;
    VectorXd b_update, b_reset, b_cand, decay_raw, b_out;

    explicit Grads(const EmbeddingModel& m)
        : w_update(MatrixXd::Zero(m.hidden_dim, m.input_dim)),
          u_update(MatrixXd::Zero(m.hidden_dim, m.hidden_dim)),
          w_reset(MatrixXd::Zero(m.hidden_dim, m.input_dim)),
          u_reset(MatrixXd::Zero(m.hidden_dim, m.hidden_dim)),
          w_cand(MatrixXd::Zero(m.hidden_dim, m.input_dim)),
          u_cand(MatrixXd::Zero(m.hidden_dim, m.hidden_dim)),
          w_out(MatrixXd::Zero(m.obs_dim(), m.hidden_dim)),
          b_update(VectorXd::Zero(m.hidden_dim)),
          b_reset(VectorXd::Zero(m.hidden_dim)),
          b_cand(VectorXd::Zero(m.hidden_dim)),
          decay_raw(VectorXd::Zero(m.hidden_dim)),
          b_out(VectorXd::Zero(m.obs_dim())) {}

    std::vector<std::pair<const double*, Index>> spans(const EmbeddingModel& m) const {
        std::vector<std::pair<const double*, Index>> v = {
            {w_update.data(), w_update.size()}, {u_update.data(), u_update.size()},
            {b_update.data(), b_update.size()}, {w_reset.data(), w_reset.size()},
            {u_reset.data(), u_reset.size()},   {b_reset.data(), b_reset.size()},
            {w_cand.data(), w_cand.size()},     {u_cand.data(), u_cand.size()},
            {b_cand.data(), b_cand.size()},
        };
        if (m.kind == SeriesKind::event) v.push_back({decay_raw.data(), decay_raw.size()});
        v.push_back({w_out.data(), w_out.size()});
        v.push_back({b_out.data(), b_out.size()});
        return v;
    }
};

// Standardized inputs precomputed once per sequence.
struct Prepared {
    MatrixXd z;       // n x input_dim cell inputs (standardized, gap appended)
    MatrixXd target;  // n x obs_dim standardized observations
    VectorXd gap;     // scaled gaps consumed by each step
};

Prepared prepare(const EmbeddingModel& m, const ObservationSequence& seq) {
    if (seq.kind != m.kind) {
        throw InvalidInputError("sequence kind does not match model kind");
    }
    if (seq.dim() != m.obs_dim()) {
        throw InvalidInputError("sequence dimensionality does not match model");
    }
    const Index n = seq.size();
    const Index d = m.obs_dim();
    Prepared p;
    p.target.resize(n, d);
    for (Index i = 0; i < n; ++i) {
        p.target.row(i) =
            ((seq.values.row(i).transpose() - m.x_mean).array() / m.x_std.array())
                .matrix()
                .transpose();
    }
    p.gap.resize(n);
    for (Index i = 0; i < n; ++i) {
        p.gap(i) = seq.step_gap(i) / m.dt_scale;
    }
    p.z.resize(n, m.input_dim);
    p.z.leftCols(d) = p.target;
    if (m.kind == SeriesKind::event) p.z.col(d) = p.gap;
    return p;
}

// Per-step activations cached for the backward pass.
struct StepCache {
    VectorXd h_in, a, hd, u, r, rh, c, h_out, resid;
    bool has_pred = false;
};

// Forward (and optionally backward) over steps [begin, end). Predictions
// are counted for steps whose successor exists; their squared errors sum
// into the return value. When `g` is non-null, parameter gradients of
// (sum of squared errors) / normalizer accumulate into it.
double span_pass(const EmbeddingModel& m, const Prepared& p, Index begin, Index end,
                 const VectorXd& h_start, VectorXd* h_final, Grads* g,
                 double normalizer, Index* pred_count) {
    const Index hd_dim = m.hidden_dim;
    const bool event = m.kind == SeriesKind::event;
    const VectorXd rate = event ? softplus(m.decay_raw) : VectorXd();
    const Index n = p.z.rows();

    std::vector<StepCache> cache;
    if (g) cache.resize(static_cast<std::size_t>(end - begin));

    VectorXd h = h_start;
    double sq_sum = 0.0;
    Index preds = 0;
    for (Index i = begin; i < end; ++i) {
        StepCache sc;
        sc.h_in = h;
        if (event) {
            sc.a = (-rate.array() * p.gap(i)).exp().matrix();
            sc.hd = h.cwiseProduct(sc.a);
        } else {
            sc.hd = h;
        }
        const VectorXd z = p.z.row(i).transpose();
        sc.u = sigmoid(m.w_update * z + m.u_update * sc.hd + m.b_update);
        sc.r = sigmoid(m.w_reset * z + m.u_reset * sc.hd + m.b_reset);
        sc.rh = sc.r.cwiseProduct(sc.hd);
        sc.c = (m.w_cand * z + m.u_cand * sc.rh + m.b_cand).array().tanh().matrix();
        sc.h_out = (VectorXd::Ones(hd_dim) - sc.u).cwiseProduct(sc.hd) +
                   sc.u.cwiseProduct(sc.c);
        h = sc.h_out;
        if (i + 1 < n) {
            sc.resid = m.w_out * sc.h_out + m.b_out - p.target.row(i + 1).transpose();
            sc.has_pred = true;
            sq_sum += sc.resid.squaredNorm();
            ++preds;
        }
        if (g) cache[static_cast<std::size_t>(i - begin)] = std::move(sc);
    }
    if (h_final) *h_final = h;
    if (pred_count) *pred_count = preds;
    if (!g) return sq_sum;

    // Backward through the cached window.
    const double scale = 2.0 / normalizer;
    VectorXd dh = VectorXd::Zero(hd_dim);
    for (Index i = end - 1; i >= begin; --i) {
        const StepCache& sc = cache[static_cast<std::size_t>(i - begin)];
        const VectorXd z = p.z.row(i).transpose();
        if (sc.has_pred) {
            g->w_out += scale * sc.resid * sc.h_out.transpose();
            g->b_out += scale * sc.resid;
            dh += scale * (m.w_out.transpose() * sc.resid);
        }
        const VectorXd du = dh.cwiseProduct(sc.c - sc.hd);
        const VectorXd dc = dh.cwiseProduct(sc.u);
        VectorXd dhd = dh.cwiseProduct(VectorXd::Ones(hd_dim) - sc.u);

        const VectorXd dpre_c =
            dc.cwiseProduct((1.0 - sc.c.array().square()).matrix());
        g->w_cand += dpre_c * z.transpose();
        g->u_cand += dpre_c * sc.rh.transpose();
        g->b_cand += dpre_c;
        const VectorXd drh = m.u_cand.transpose() * dpre_c;
        const VectorXd dr = drh.cwiseProduct(sc.hd);
        dhd += drh.cwiseProduct(sc.r);

        const VectorXd dpre_u = du.cwiseProduct(sc.u).cwiseProduct(
            (VectorXd::Ones(hd_dim) - sc.u));
        g->w_update += dpre_u * z.transpose();
        g->u_update += dpre_u * sc.hd.transpose();
        g->b_update += dpre_u;
        dhd += m.u_update.transpose() * dpre_u;

        const VectorXd dpre_r = dr.cwiseProduct(sc.r).cwiseProduct(
            (VectorXd::Ones(hd_dim) - sc.r));
        g->w_reset += dpre_r * z.transpose();
        g->u_reset += dpre_r * sc.hd.transpose();
        g->b_reset += dpre_r;
        dhd += m.u_reset.transpose() * dpre_r;

        if (event) {
            const VectorXd da = dhd.cwiseProduct(sc.h_in);
            g->decay_raw -=
                p.gap(i) * da.cwiseProduct(sc.a).cwiseProduct(sigmoid(m.decay_raw));
            dh = dhd.cwiseProduct(sc.a);
        } else {
            dh = dhd;
        }
    }
    return sq_sum;
}

void optimizer_step(EmbeddingModel& m, const Grads& g, const TrainConfig& cfg,
                    VectorXd& adam_m, VectorXd& adam_v, long& adam_t) {
    const auto params = param_spans(m);
    const auto grads = g.spans(m);
    if (cfg.optimizer == "sgd") {
        for (std::size_t k = 0; k < params.size(); ++k) {
            Eigen::Map<VectorXd> theta(params[k].first, params[k].second);
            Eigen::Map<const VectorXd> grad(grads[k].first, grads[k].second);
            theta -= cfg.learning_rate * grad;
        }
        return;
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++adam_t;
    Index off = 0;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(adam_t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(adam_t));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Eigen::Map<VectorXd> theta(params[k].first, params[k].second);
        Eigen::Map<const VectorXd> grad(grads[k].first, grads[k].second);
        auto mseg = adam_m.segment(off, params[k].second);
        auto vseg = adam_v.segment(off, params[k].second);
        mseg = beta1 * mseg + (1.0 - beta1) * grad;
        vseg = beta2 * vseg + (1.0 - beta2) * grad.cwiseProduct(grad);
        theta.array() -= cfg.learning_rate * (mseg.array() / bc1) /
                         ((vseg.array() / bc2).sqrt() + eps);
        off += params[k].second;
    }
}

}  // namespace

// ============================================================
// Model basics
// ============================================================

Eigen::VectorXd EmbeddingModel::standardize(const Eigen::VectorXd& x) const {
    return ((x - x_mean).array() / x_std.array()).matrix();
}

void EmbeddingModel::validate() const {
    if (hidden_dim < 1 || input_dim < 1) {
        throw InvalidInputError("model dimensions must be positive");
    }
    const Index p = hidden_dim, q = input_dim, d = obs_dim();
    if (d < 1) throw InvalidInputError("event models need input_dim >= 2");
    auto bad = [](const MatrixXd& m, Index r, Index c) {
        return m.rows() != r || m.cols() != c || !m.allFinite();
    };
    if (bad(w_update, p, q) || bad(w_reset, p, q) || bad(w_cand, p, q) ||
        bad(u_update, p, p) || bad(u_reset, p, p) || bad(u_cand, p, p) ||
        bad(w_out, d, p)) {
        throw InvalidInputError("model weight shapes are inconsistent");
    }
    if (b_update.size() != p || b_reset.size() != p || b_cand.size() != p ||
        b_out.size() != d || h0.size() != p || x_mean.size() != d || x_std.size() != d) {
        throw InvalidInputError("model vector shapes are inconsistent");
    }
    if (kind == SeriesKind::event && decay_raw.size() != p) {
        throw InvalidInputError("event models need a decay vector of hidden_dim entries");
    }
    if (!(dt_scale > 0.0)) throw InvalidInputError("dt_scale must be positive");
    if ((x_std.array() <= 0.0).any()) {
        throw InvalidInputError("standardization scales must be positive");
    }
}

EmbeddingModel init_model(SeriesKind kind, int obs_dim, int hidden_dim,
                          std::uint64_t seed) {
    if (obs_dim < 1 || hidden_dim < 1) {
        throw InvalidInputError("init_model: dimensions must be positive");
    }
    EmbeddingModel m;
    m.kind = kind;
    m.hidden_dim = hidden_dim;
    m.input_dim = obs_dim + (kind == SeriesKind::event ? 1 : 0);
    const Index p = hidden_dim, q = m.input_dim, d = obs_dim;
    m.w_update.resize(p, q);
    m.w_reset.resize(p, q);
    m.w_cand.resize(p, q);
    m.u_update.resize(p, p);
    m.u_reset.resize(p, p);
    m.u_cand.resize(p, p);
    m.b_update.resize(p);
    m.b_reset.resize(p);
    m.b_cand.resize(p);
    m.decay_raw = kind == SeriesKind::event ? VectorXd::Zero(p) : VectorXd();
    m.w_out.resize(d, p);
    m.b_out.resize(d);
    m.h0 = VectorXd::Zero(p);
    m.x_mean = VectorXd::Zero(d);
    m.x_std = VectorXd::Ones(d);
    m.dt_scale = 1.0;

    Rng rng(seed);
    auto fill = [&rng](double* data, Index len, Index fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (Index i = 0; i < len; ++i) {
            data[i] = bound * (2.0 * rng.uniform() - 1.0);
        }
    };
    for (auto& [ptr, len] : param_spans(m)) {
        Index fan = p;
        if (ptr == m.w_update.data() || ptr == m.w_reset.data() || ptr == m.w_cand.data()) {
            fan = q;
        }
        fill(ptr, len, fan);
    }
    m.validate();
    return m;
}

Eigen::VectorXd forward_step(const EmbeddingModel& model, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& h, double dt) {
    model.validate();
    if (x.size() != model.obs_dim()) {
        throw InvalidInputError("forward_step: observation dimensionality mismatch");
    }
    if (h.size() != model.hidden_dim) {
        throw InvalidInputError("forward_step: hidden state dimensionality mismatch");
    }
    if (!x.allFinite() || !h.allFinite() || !std::isfinite(dt)) {
        throw InvalidInputError("forward_step: non-finite input");
    }
    const bool event = model.kind == SeriesKind::event;
    if (event && !(dt >= 0.0)) {
        throw InvalidInputError("forward_step: event gaps must be nonnegative");
    }
    VectorXd z(model.input_dim);
    z.head(model.obs_dim()) = model.standardize(x);
    const double gap = dt / model.dt_scale;
    if (event) z(model.obs_dim()) = gap;

    VectorXd hd = h;
    if (event) {
        hd = h.cwiseProduct((-softplus(model.decay_raw).array() * gap).exp().matrix());
    }
    const VectorXd u = sigmoid(model.w_update * z + model.u_update * hd + model.b_update);
    const VectorXd r = sigmoid(model.w_reset * z + model.u_reset * hd + model.b_reset);
    const VectorXd c =
        (model.w_cand * z + model.u_cand * r.cwiseProduct(hd) + model.b_cand)
            .array()
            .tanh()
            .matrix();
    return (VectorXd::Ones(model.hidden_dim) - u).cwiseProduct(hd) + u.cwiseProduct(c);
}

Eigen::MatrixXd embed_sequence(const EmbeddingModel& model,
                               const ObservationSequence& seq) {
    model.validate();
    seq.validate();
    const Prepared p = prepare(model, seq);
    const Index n = seq.size();
    MatrixXd out(n, model.hidden_dim);
    VectorXd h = model.h0;
    const bool event = model.kind == SeriesKind::event;
    const VectorXd rate = event ? softplus(model.decay_raw) : VectorXd();
    for (Index i = 0; i < n; ++i) {
        VectorXd hd = h;
        if (event) {
            hd = h.cwiseProduct((-rate.array() * p.gap(i)).exp().matrix());
        }
        const VectorXd z = p.z.row(i).transpose();
        const VectorXd u =
            sigmoid(model.w_update * z + model.u_update * hd + model.b_update);
        const VectorXd r =
            sigmoid(model.w_reset * z + model.u_reset * hd + model.b_reset);
        const VectorXd c =
            (model.w_cand * z + model.u_cand * r.cwiseProduct(hd) + model.b_cand)
                .array()
                .tanh()
                .matrix();
        h = (VectorXd::Ones(model.hidden_dim) - u).cwiseProduct(hd) +
            u.cwiseProduct(c);
        out.row(i) = h.transpose();
    }
    return out;
}

// ============================================================
// Training
// ============================================================

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw InvalidInputError("learning_rate must be positive");
    if (epochs < 1) throw InvalidInputError("epochs must be >= 1");
    if (optimizer != "adam" && optimizer != "sgd") {
        throw InvalidInputError("optimizer must be \"adam\" or \"sgd\"");
    }
    if (bptt_window < 1) throw InvalidInputError("bptt_window must be >= 1");
}

TrainResult train(const ObservationSequence& seq, int hidden_dim,
                  const TrainConfig& cfg) {
    cfg.validate();
    seq.validate();
    const Index n = seq.size();
    if (n < cfg.bptt_window + 1) {
        throw InsufficientDataError("training needs at least bptt_window + 1 observations");
    }

    EmbeddingModel model =
        init_model(seq.kind, static_cast<int>(seq.dim()), hidden_dim, cfg.seed);

    // Standardization from the training sequence only.
    const Index d = seq.dim();
    model.x_mean = seq.values.colwise().mean();
    for (Index j = 0; j < d; ++j) {
        const double var =
            (seq.values.col(j).array() - model.x_mean(j)).square().sum() /
            static_cast<double>(n - 1);
        const double sd = std::sqrt(var);
        model.x_std(j) = sd > 1e-12 ? sd : 1.0;
    }
    if (seq.kind == SeriesKind::event) {
        const double mean_gap =
            (seq.timestamps(n - 1) - seq.timestamps(0)) / static_cast<double>(n - 1);
        model.dt_scale = mean_gap > 1e-12 ? mean_gap : 1.0;
    }

    const Prepared p = prepare(model, seq);

    VectorXd adam_m = VectorXd::Zero(total_params(model));
    VectorXd adam_v = VectorXd::Zero(total_params(model));
    long adam_t = 0;

    TrainResult result;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        VectorXd h = model.h0;
        double epoch_sq = 0.0;
        Index epoch_preds = 0;
        for (Index begin = 0; begin < n; begin += cfg.bptt_window) {
            const Index end = std::min<Index>(begin + cfg.bptt_window, n);
            Grads g(model);
            VectorXd h_next;
            Index preds = 0;
            const double sq =
                span_pass(model, p, begin, end, h, &h_next, &g, 1.0, &preds);
            if (preds > 0) {
                // Normalize the accumulated gradient by the prediction count.
                const double inv = 1.0 / static_cast<double>(preds);
                Grads scaled = std::move(g);
                for (auto& mat : {&scaled.w_update, &scaled.u_update, &scaled.w_reset,
                                  &scaled.u_reset, &scaled.w_cand, &scaled.u_cand,
                                  &scaled.w_out}) {
                    *mat *= inv;
                }
                for (auto& vec : {&scaled.b_update, &scaled.b_reset, &scaled.b_cand,
                                  &scaled.decay_raw, &scaled.b_out}) {
                    *vec *= inv;
                }
                optimizer_step(model, scaled, cfg, adam_m, adam_v, adam_t);
            }
            epoch_sq += sq;
            epoch_preds += preds;
            h = h_next;
        }
        const double loss = epoch_sq / static_cast<double>(epoch_preds);
        if (!std::isfinite(loss)) {
            throw DivergenceError(
                "training loss became non-finite at epoch " + std::to_string(epoch),
                epoch);
        }
        result.loss_curve.push_back(loss);
    }
    result.model = std::move(model);
    return result;
}

double predictive_mse(const EmbeddingModel& model, const ObservationSequence& seq) {
    model.validate();
    seq.validate();
    const Prepared p = prepare(model, seq);
    const Index n = seq.size();
    Index preds = 0;
    const double sq =
        span_pass(model, p, 0, n, model.h0, nullptr, nullptr, 1.0, &preds);
    return sq / static_cast<double>(preds);
}

Eigen::VectorXd loss_gradient(const EmbeddingModel& model,
                              const ObservationSequence& seq) {
    model.validate();
    seq.validate();
    EmbeddingModel work = model;
    const Prepared p = prepare(work, seq);
    const Index n = seq.size();
    Grads g(work);
    span_pass(work, p, 0, n, work.h0, nullptr, &g,
              static_cast<double>(n - 1), nullptr);
    const auto spans = g.spans(work);
    Index total = 0;
    for (const auto& s : spans) total += s.second;
    Eigen::VectorXd flat(total);
    Index at = 0;
    for (const auto& s : spans) {
        for (Index i = 0; i < s.second; ++i) flat(at++) = s.first[i];
    }
    return flat;
}

double gradient_check(const EmbeddingModel& model, const ObservationSequence& seq,
                      double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidInputError("epsilon must be positive");
    model.validate();
    seq.validate();
    EmbeddingModel work = model;
    const Prepared p = prepare(work, seq);
    const Index n = seq.size();
    const double normalizer = static_cast<double>(n - 1);

    Grads analytic(work);
    span_pass(work, p, 0, n, work.h0, nullptr, &analytic, normalizer, nullptr);

    auto loss_at = [&]() {
        Index preds = 0;
        const double sq =
            span_pass(work, p, 0, n, work.h0, nullptr, nullptr, 1.0, &preds);
        return sq / normalizer;
    };

    double worst = 0.0;
    const auto params = param_spans(work);
    const auto grads = analytic.spans(work);
    for (std::size_t k = 0; k < params.size(); ++k) {
        for (Index i = 0; i < params[k].second; ++i) {
            double& theta = params[k].first[i];
            const double saved = theta;
            theta = saved + epsilon;
            const double up = loss_at();
            theta = saved - epsilon;
            const double down = loss_at();
            theta = saved;
            const double numeric = (up - down) / (2.0 * epsilon);
            const double analytic_g = grads[k].first[i];
            const double denom =
                std::max({std::abs(numeric), std::abs(analytic_g), 1e-6});
            worst = std::max(worst, std::abs(numeric - analytic_g) / denom);
        }
    }
    return worst;
}

// ============================================================
// Persistence
// ============================================================

namespace {

nlohmann::json matrix_to_json(const MatrixXd& m) {
    nlohmann::json a = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
    }
    return a;
}

nlohmann::json vector_to_json(const VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

MatrixXd matrix_from_json(const nlohmann::json& a, Index rows, Index cols,
                          const char* name) {
    if (!a.is_array() || static_cast<Index>(a.size()) != rows * cols) {
        throw ParseError(std::string("model parameter has wrong length: ") + name);
    }
    MatrixXd m(rows, cols);
    Index k = 0;
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = a[k++].get<double>();
    }
    return m;
}

VectorXd vector_from_json(const nlohmann::json& a, Index len, const char* name) {
    if (!a.is_array() || static_cast<Index>(a.size()) != len) {
        throw ParseError(std::string("model parameter has wrong length: ") + name);
    }
    VectorXd v(len);
    for (Index i = 0; i < len; ++i) v(i) = a[i].get<double>();
    return v;
}

}  // namespace

std::string model_to_json(const EmbeddingModel& model) {
    model.validate();
    nlohmann::json params;
    params["w_update"] = matrix_to_json(model.w_update);
    params["u_update"] = matrix_to_json(model.u_update);
    params["b_update"] = vector_to_json(model.b_update);
    params["w_reset"] = matrix_to_json(model.w_reset);
    params["u_reset"] = matrix_to_json(model.u_reset);
    params["b_reset"] = vector_to_json(model.b_reset);
    params["w_cand"] = matrix_to_json(model.w_cand);
    params["u_cand"] = matrix_to_json(model.u_cand);
    params["b_cand"] = vector_to_json(model.b_cand);
    if (model.kind == SeriesKind::event) {
        params["decay_raw"] = vector_to_json(model.decay_raw);
    }
    params["w_out"] = matrix_to_json(model.w_out);
    params["b_out"] = vector_to_json(model.b_out);
    params["h0"] = vector_to_json(model.h0);
    params["x_mean"] = vector_to_json(model.x_mean);
    params["x_std"] = vector_to_json(model.x_std);
    params["dt_scale"] = nlohmann::json::array({model.dt_scale});

    nlohmann::json doc;
    doc["version"] = 1;
    doc["kind"] = model.kind == SeriesKind::event ? "event" : "regular";
    doc["hidden_dim"] = model.hidden_dim;
    doc["input_dim"] = model.input_dim;
    doc["params"] = params;
    return doc.dump(2) + "\n";
}

EmbeddingModel model_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("model document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("version") || doc["version"] != 1) {
        throw ParseError("model document must declare version 1");
    }
    for (const char* key : {"kind", "hidden_dim", "input_dim", "params"}) {
        if (!doc.contains(key)) {
            throw ParseError(std::string("model document is missing \"") + key + "\"");
        }
    }
    EmbeddingModel m;
    const std::string kind = doc["kind"].get<std::string>();
    if (kind == "regular") {
        m.kind = SeriesKind::regular;
    } else if (kind == "event") {
        m.kind = SeriesKind::event;
    } else {
        throw ParseError("model kind must be \"regular\" or \"event\"");
    }
    m.hidden_dim = doc["hidden_dim"].get<int>();
    m.input_dim = doc["input_dim"].get<int>();
    if (m.hidden_dim < 1 || m.input_dim < 1 || m.obs_dim() < 1) {
        throw ParseError("model dimensions must be positive");
    }
    const Index p = m.hidden_dim, q = m.input_dim, d = m.obs_dim();
    const nlohmann::json& params = doc["params"];
    auto need = [&params](const char* name) -> const nlohmann::json& {
        if (!params.contains(name)) {
            throw ParseError(std::string("model document is missing parameter ") + name);
        }
        return params[name];
    };
    m.w_update = matrix_from_json(need("w_update"), p, q, "w_update");
    m.u_update = matrix_from_json(need("u_update"), p, p, "u_update");
    m.b_update = vector_from_json(need("b_update"), p, "b_update");
    m.w_reset = matrix_from_json(need("w_reset"), p, q, "w_reset");
    m.u_reset = matrix_from_json(need("u_reset"), p, p, "u_reset");
    m.b_reset = vector_from_json(need("b_reset"), p, "b_reset");
    m.w_cand = matrix_from_json(need("w_cand"), p, q, "w_cand");
    m.u_cand = matrix_from_json(need("u_cand"), p, p, "u_cand");
    m.b_cand = vector_from_json(need("b_cand"), p, "b_cand");
    if (m.kind == SeriesKind::event) {
        m.decay_raw = vector_from_json(need("decay_raw"), p, "decay_raw");
    }
    m.w_out = matrix_from_json(need("w_out"), d, p, "w_out");
    m.b_out = vector_from_json(need("b_out"), d, "b_out");
    m.h0 = vector_from_json(need("h0"), p, "h0");
    m.x_mean = vector_from_json(need("x_mean"), d, "x_mean");
    m.x_std = vector_from_json(need("x_std"), d, "x_std");
    m.dt_scale = vector_from_json(need("dt_scale"), 1, "dt_scale")(0);
    m.validate();
    return m;
}

void save_model(const EmbeddingModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << model_to_json(model);
    if (!out) throw IoError("write failed: " + path);
}

EmbeddingModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace renal
