#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gridsa/common.hpp"
#include "gridsa/rng.hpp"

namespace gridsa::nn {

// Row-major dense matrix of 64-bit floats. All products are plain loops so a
// fixed seed reproduces training bit for bit.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t size() const { return data.size(); }
    void fill(double v) { std::fill(data.begin(), data.end(), v); }
    bool all_finite() const;
};

Matrix matmul(const Matrix& a, const Matrix& b);            // a * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);         // a^T * b
Matrix matmul_nt(const Matrix& a, const Matrix& b);         // a * b^T
void add_inplace(Matrix& a, const Matrix& b);
void add_row_broadcast(Matrix& a, const Matrix& row);       // a[r] += row, row is 1 x cols
Matrix column_sums(const Matrix& a);                        // 1 x cols
Matrix column_means(const Matrix& a);

struct Parameter {
    Matrix value;
    Matrix grad;

    Parameter() = default;
    explicit Parameter(Matrix v) : value(std::move(v)), grad(value.rows, value.cols) {}
    Parameter(int r, int c) : value(r, c), grad(r, c) {}
    void zero_grad() { grad.fill(0.0); }
    std::size_t size() const { return value.size(); }
};

// Glorot-uniform initialization with the project RNG.
void glorot_init(Matrix& m, Rng& rng);

Matrix dense_forward(const Matrix& x, const Parameter& w, const Parameter& b);
// Accumulates dW/db into the parameters and returns dX.
Matrix dense_backward(const Matrix& x, Parameter& w, Parameter& b, const Matrix& upstream);

Matrix relu(const Matrix& x);
Matrix relu_backward(const Matrix& x, const Matrix& upstream);

// Row-wise softmax with max subtraction; rows sum to 1 within 1e-12.
Matrix softmax_rows(const Matrix& z);

// Mean binary cross-entropy of the predicted class probabilities against 0/1
// labels, with the combined softmax gradient w.r.t. the logits, (p - y)/n.
struct LossResult {
    double loss = 0.0;
    Matrix dlogits;  // n x 2
};
LossResult bce_loss(const std::vector<int>& y_true, const Matrix& probs);

struct AdamState {
    std::vector<Matrix> first_moment;
    std::vector<Matrix> second_moment;
    long step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double learning_rate = 1e-3;

    static AdamState for_params(const std::vector<Parameter*>& params, double lr = 1e-3);
};

// Bias-corrected Adam update over the same parameter list the state was built for.
void adam_step(const std::vector<Parameter*>& params, AdamState& state);

// Reduce-on-plateau schedule: halves the rate after `patience` epochs without
// validation-loss improvement, never below the floor.
struct LRSchedule {
    double initial = 1e-3;
    double floor = 1e-5;
    double decay_factor = 0.5;
    int patience = 10;

    double rate() const { return current_ < 0 ? initial : current_; }
    void observe(double val_loss);

private:
    double current_ = -1.0;
    double best_ = 0.0;
    bool has_best_ = false;
    int bad_epochs_ = 0;
};

// Central-difference check of an arbitrary scalar loss against the gradients
// the callback leaves in `params`. Probes at most `max_coords` coordinates and
// returns the maximum relative error.
double gradcheck(const std::function<double(bool)>& loss_with_optional_backward,
                 const std::vector<Parameter*>& params, Rng& rng, int max_coords = 200,
                 double h = 1e-5);

}  // namespace gridsa::nn
