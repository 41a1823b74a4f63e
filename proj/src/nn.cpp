#include "gridsa/nn.hpp"

#include <algorithm>
#include <cmath>

namespace gridsa::nn {

bool Matrix::all_finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

void check_shapes(int a, int b, const char* what) {
    if (a != b) throw ValidationError(std::string("shape mismatch in ") + what);
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_shapes(a.cols, b.rows, "matmul");
    Matrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = &a.data[static_cast<std::size_t>(i) * a.cols];
        double* orow = &out.data[static_cast<std::size_t>(i) * b.cols];
        for (int k = 0; k < a.cols; ++k) {
            double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
            for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    check_shapes(a.rows, b.rows, "matmul_tn");
    Matrix out(a.cols, b.cols);
    for (int k = 0; k < a.rows; ++k) {
        const double* arow = &a.data[static_cast<std::size_t>(k) * a.cols];
        const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
        for (int i = 0; i < a.cols; ++i) {
            double aki = arow[i];
            if (aki == 0.0) continue;
            double* orow = &out.data[static_cast<std::size_t>(i) * b.cols];
            for (int j = 0; j < b.cols; ++j) orow[j] += aki * brow[j];
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    check_shapes(a.cols, b.cols, "matmul_nt");
    Matrix out(a.rows, b.rows);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = &a.data[static_cast<std::size_t>(i) * a.cols];
        for (int j = 0; j < b.rows; ++j) {
            const double* brow = &b.data[static_cast<std::size_t>(j) * b.cols];
            double s = 0.0;
            for (int k = 0; k < a.cols; ++k) s += arow[k] * brow[k];
            out.at(i, j) = s;
        }
    }
    return out;
}

void add_inplace(Matrix& a, const Matrix& b) {
    check_shapes(static_cast<int>(a.size()), static_cast<int>(b.size()), "add_inplace");
    for (std::size_t i = 0; i < a.size(); ++i) a.data[i] += b.data[i];
}

void add_row_broadcast(Matrix& a, const Matrix& row) {
    check_shapes(a.cols, row.cols, "add_row_broadcast");
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) a.at(i, j) += row.at(0, j);
}

Matrix column_sums(const Matrix& a) {
    Matrix out(1, a.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) out.at(0, j) += a.at(i, j);
    return out;
}

Matrix column_means(const Matrix& a) {
    Matrix out = column_sums(a);
    if (a.rows > 0)
        for (int j = 0; j < a.cols; ++j) out.at(0, j) /= static_cast<double>(a.rows);
    return out;
}

void glorot_init(Matrix& m, Rng& rng) {
    double limit = std::sqrt(6.0 / (static_cast<double>(m.rows) + static_cast<double>(m.cols)));
    for (double& v : m.data) v = rng.uniform(-limit, limit);
}

Matrix dense_forward(const Matrix& x, const Parameter& w, const Parameter& b) {
    Matrix out = matmul(x, w.value);
    add_row_broadcast(out, b.value);
    return out;
}

Matrix dense_backward(const Matrix& x, Parameter& w, Parameter& b, const Matrix& upstream) {
    add_inplace(w.grad, matmul_tn(x, upstream));
    add_inplace(b.grad, column_sums(upstream));
    return matmul_nt(upstream, w.value);
}

Matrix relu(const Matrix& x) {
    Matrix out = x;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

Matrix relu_backward(const Matrix& x, const Matrix& upstream) {
    check_shapes(static_cast<int>(x.size()), static_cast<int>(upstream.size()), "relu_backward");
    Matrix out(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i)
        out.data[i] = x.data[i] > 0.0 ? upstream.data[i] : 0.0;
    return out;
}

Matrix softmax_rows(const Matrix& z) {
    if (z.cols < 2) throw ValidationError("softmax needs at least two columns");
    Matrix out(z.rows, z.cols);
    for (int i = 0; i < z.rows; ++i) {
        double mx = z.at(i, 0);
        for (int j = 1; j < z.cols; ++j) mx = std::max(mx, z.at(i, j));
        double sum = 0.0;
        for (int j = 0; j < z.cols; ++j) {
            double e = std::exp(z.at(i, j) - mx);
            out.at(i, j) = e;
            sum += e;
        }
        for (int j = 0; j < z.cols; ++j) out.at(i, j) /= sum;
    }
    return out;
}

LossResult bce_loss(const std::vector<int>& y_true, const Matrix& probs) {
    if (static_cast<int>(y_true.size()) != probs.rows || probs.cols != 2)
        throw ValidationError("bce_loss expects n x 2 probabilities");
    constexpr double eps = 1e-12;
    int n = probs.rows;
    LossResult res;
    res.dlogits = Matrix(n, 2);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        int y = y_true[static_cast<std::size_t>(i)];
        double p = std::clamp(probs.at(i, 1), eps, 1.0 - eps);  // secure-class probability
        total += y == 1 ? -std::log(p) : -std::log(1.0 - p);
        // combined softmax + cross-entropy gradient
        res.dlogits.at(i, 0) = (probs.at(i, 0) - (y == 0 ? 1.0 : 0.0)) / n;
        res.dlogits.at(i, 1) = (probs.at(i, 1) - (y == 1 ? 1.0 : 0.0)) / n;
    }
    res.loss = total / n;
    return res;
}

AdamState AdamState::for_params(const std::vector<Parameter*>& params, double lr) {
    AdamState state;
    state.learning_rate = lr;
    for (const Parameter* p : params) {
        state.first_moment.emplace_back(p->value.rows, p->value.cols);
        state.second_moment.emplace_back(p->value.rows, p->value.cols);
    }
    return state;
}

void adam_step(const std::vector<Parameter*>& params, AdamState& state) {
    if (params.size() != state.first_moment.size())
        throw ValidationError("adam_step parameter list does not match state");
    ++state.step_count;
    double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Parameter& p = *params[k];
        Matrix& m = state.first_moment[k];
        Matrix& v = state.second_moment[k];
        for (std::size_t i = 0; i < p.size(); ++i) {
            double g = p.grad.data[i];
            m.data[i] = state.beta1 * m.data[i] + (1.0 - state.beta1) * g;
            v.data[i] = state.beta2 * v.data[i] + (1.0 - state.beta2) * g * g;
            double mhat = m.data[i] / bc1;
            double vhat = v.data[i] / bc2;
            p.value.data[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
        }
    }
}

void LRSchedule::observe(double val_loss) {
    if (current_ < 0) current_ = initial;
    if (!has_best_ || val_loss < best_ - 1e-12) {
        best_ = val_loss;
        has_best_ = true;
        bad_epochs_ = 0;
        return;
    }
    if (++bad_epochs_ >= patience) {
        current_ = std::max(floor, current_ * decay_factor);
        bad_epochs_ = 0;
    }
}

double gradcheck(const std::function<double(bool)>& loss_with_optional_backward,
                 const std::vector<Parameter*>& params, Rng& rng, int max_coords, double h) {
    for (Parameter* p : params) p->zero_grad();
    loss_with_optional_backward(true);  // populate analytic gradients

    std::size_t total = 0;
    for (const Parameter* p : params) total += p->size();
    std::size_t probes = std::min<std::size_t>(static_cast<std::size_t>(max_coords), total);

    double max_rel = 0.0;
    for (std::size_t probe = 0; probe < probes; ++probe) {
        std::size_t flat = probes == total ? probe : static_cast<std::size_t>(rng.below(total));
        std::size_t offset = flat;
        Parameter* target = nullptr;
        for (Parameter* p : params) {
            if (offset < p->size()) {
                target = p;
                break;
            }
            offset -= p->size();
        }
        double saved = target->value.data[offset];
        target->value.data[offset] = saved + h;
        double up = loss_with_optional_backward(false);
        target->value.data[offset] = saved - h;
        double down = loss_with_optional_backward(false);
        target->value.data[offset] = saved;

        double numeric = (up - down) / (2.0 * h);
        double analytic = target->grad.data[offset];
        double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
        max_rel = std::max(max_rel, std::abs(numeric - analytic) / denom);
    }
    return max_rel;
}

}  // namespace gridsa::nn
