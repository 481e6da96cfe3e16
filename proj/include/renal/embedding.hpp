#pragma once

#include "renal/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace renal {

// Recurrent history-embedding network: a gated recurrent cell plus an
// affine one-step decoder, trained to predict the next observation.
//
// For event data the cell consumes the observation vector with the
// inter-event gap appended as an extra input channel, and the incoming
// hidden state is first damped by exp(-softplus(decay_raw) * gap), so the
// embedding decays toward the origin over long quiet stretches. For
// regular data the gap channel and the decay gate are absent and the cell
// reduces to a standard gated update:
//     u = sigmoid(Wu z + Uu h + bu)          update gate
//     r = sigmoid(Wr z + Ur h + br)          reset gate
//     c = tanh(Wc z + Uc (r .* h) + bc)      candidate
//     h' = (1 - u) .* h + u .* c
//
// Observations are standardized per dimension with statistics stored in the
// model (fitted on the training sequence only); event gaps are divided by
// the stored mean training gap.
struct EmbeddingModel {
    SeriesKind kind = SeriesKind::regular;
    int hidden_dim = 0;
    int input_dim = 0;  // cell input width: observation dim, +1 for event data

    Eigen::MatrixXd w_update, w_reset, w_cand;  // hidden_dim x input_dim
    Eigen::MatrixXd u_update, u_reset, u_cand;  // hidden_dim x hidden_dim
    Eigen::VectorXd b_update, b_reset, b_cand;  // hidden_dim
    Eigen::VectorXd decay_raw;                  // hidden_dim, event kind only
    Eigen::MatrixXd w_out;                      // obs_dim x hidden_dim
    Eigen::VectorXd b_out;                      // obs_dim
    Eigen::VectorXd h0;                         // hidden_dim, fixed zero

    Eigen::VectorXd x_mean, x_std;  // per-dimension standardization
    double dt_scale = 1.0;          // mean training gap (event kind)

    int obs_dim() const {
        return input_dim - (kind == SeriesKind::event ? 1 : 0);
    }

    Eigen::VectorXd standardize(const Eigen::VectorXd& x) const;

    void validate() const;
};

// Fresh model with weights drawn uniformly from
// [-1/sqrt(fan_in), +1/sqrt(fan_in)] using the given seed and identity
// standardization.
EmbeddingModel init_model(SeriesKind kind, int obs_dim, int hidden_dim,
                          std::uint64_t seed);

// One cell update on a raw observation; standardization and gap scaling are
// applied internally. Output is the next hidden state, every component in
// (-1, 1) once gates engage (convex mix of a damped state and a tanh
// candidate).
Eigen::VectorXd forward_step(const EmbeddingModel& model, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& h, double dt);

// Embeds a whole sequence: row i is the hidden state after consuming
// observation i, starting from h0. Causal: row i depends only on
// observations 0..i and their gaps.
Eigen::MatrixXd embed_sequence(const EmbeddingModel& model,
                               const ObservationSequence& seq);

struct TrainConfig {
    double learning_rate = 1e-3;
    int epochs = 100;
    std::string optimizer = "adam";  // "adam" or "sgd"
    std::uint64_t seed = 1;
    int bptt_window = 32;

    void validate() const;
};

struct TrainResult {
    EmbeddingModel model;
    std::vector<double> loss_curve;  // mean per-step squared error by epoch
};

// Trains a fresh model on `seq` by truncated backpropagation through time:
// the sequence is cut into bptt_window-step windows, the hidden state flows
// across window boundaries, gradients do not, and the optimizer steps once
// per window. Throws DivergenceError (with the epoch) if the loss leaves
// the finite range, and InsufficientDataError unless
// seq.size() >= bptt_window + 1.
TrainResult train(const ObservationSequence& seq, int hidden_dim,
                  const TrainConfig& cfg);

// Mean squared one-step prediction error of `model` on `seq`, in
// standardized units.
double predictive_mse(const EmbeddingModel& model, const ObservationSequence& seq);

// Analytic gradient of the mean one-step prediction loss on `seq`, flattened
// over every trainable parameter in a fixed order. Zero at an exact fit.
Eigen::VectorXd loss_gradient(const EmbeddingModel& model,
                              const ObservationSequence& seq);

// Largest relative disagreement between the analytic parameter gradient of
// the prediction loss on `seq` and central finite differences with step
// `epsilon`, taken over every trainable parameter.
double gradient_check(const EmbeddingModel& model, const ObservationSequence& seq,
                      double epsilon);

// Versioned JSON persistence; round-trips are bit-exact.
void save_model(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_model(const std::string& path);

std::string model_to_json(const EmbeddingModel& model);
EmbeddingModel model_from_json(const std::string& text);

}  // namespace renal
