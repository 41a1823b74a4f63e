#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridsa/nn.hpp"
#include "gridsa/scenario_gen.hpp"

namespace gridsa {

// D^-1/2 (A + I) D^-1/2 with the self-loop degrees; symmetric, entries >= 0.
struct NormalizedAdjacency {
    int n = 0;
    std::vector<double> a_hat;  // row-major n x n

    double at(int i, int j) const { return a_hat[static_cast<std::size_t>(i) * n + j]; }
};

NormalizedAdjacency normalize_adjacency(const GraphTopology& topology);

// Sparse form used by the models: symmetric COO including self loops.
struct SparseAdjacency {
    int n = 0;
    std::vector<int> row;
    std::vector<int> col;
    std::vector<double> val;

    // y = A_hat * x, optionally with a node offset for batched graphs
    void apply(const nn::Matrix& x, nn::Matrix& y, int node_offset = 0) const;
};

SparseAdjacency sparse_normalized_adjacency(int n, const std::vector<std::pair<int, int>>& edges);

enum class FeatureGroup { Electrical, Topological, VoltagePlusTopological, Both };

const std::vector<int>& feature_columns(FeatureGroup group);
std::string feature_group_name(FeatureGroup group);
FeatureGroup feature_group_from_name(const std::string& name);

// Disjoint union of graphs: node-concatenated features, per-graph sparse
// propagation, and a membership map driving the per-graph mean readout.
struct GraphBatch {
    int n_graphs = 0;
    int total_nodes = 0;
    nn::Matrix x;  // total_nodes x d, feature-masked
    std::vector<SparseAdjacency> adjacencies;  // one per graph
    std::vector<int> node_offsets;             // size n_graphs + 1
    std::vector<int> labels;                   // 0 = Insecure, 1 = Secure
};

GraphBatch make_batch(const GraphDataset& dataset, const std::vector<int>& sample_indices,
                      FeatureGroup group);

struct GCNModel {
    static constexpr int kLayers = 6;
    static constexpr int kHidden = 32;
    static constexpr int kClasses = 2;

    int input_dim = 7;
    std::vector<nn::Parameter> weights;  // kLayers matrices
    std::vector<nn::Parameter> biases;   // kLayers 1 x hidden rows
    nn::Parameter head_w;                // hidden x 2
    nn::Parameter head_b;                // 1 x 2

    static GCNModel create(int input_dim, std::uint64_t seed);
    std::vector<nn::Parameter*> parameters();
    std::vector<const nn::Parameter*> parameters() const;
    long parameter_count() const;

    // Forward over a batch; returns per-graph class probabilities (B x 2).
    nn::Matrix forward(const GraphBatch& batch) const;
    // Forward keeping activations, then backward from the loss gradient.
    nn::Matrix forward_backward(const GraphBatch& batch, const std::vector<int>& labels,
                                double* loss_out);
};

struct MLPModel {
    int n_nodes = 0;
    int input_dim = 7;        // features per node; flattened input is n_nodes * input_dim
    std::vector<int> widths;  // hidden widths, 3 entries; output layer is widths.back() x 2
    std::vector<nn::Parameter> weights;  // 4 dense layers
    std::vector<nn::Parameter> biases;

    // Picks the first hidden width so the parameter count lands near `target_params`.
    static MLPModel create(int n_nodes, int input_dim, long target_params, std::uint64_t seed);
    std::vector<nn::Parameter*> parameters();
    std::vector<const nn::Parameter*> parameters() const;
    long parameter_count() const;

    nn::Matrix forward(const GraphBatch& batch) const;
    nn::Matrix forward_backward(const GraphBatch& batch, const std::vector<int>& labels,
                                double* loss_out);
};

nn::Matrix gcn_predict(const GCNModel& model, const LabeledGraphSample& sample, FeatureGroup group);
nn::Matrix mlp_predict(const MLPModel& model, const LabeledGraphSample& sample, FeatureGroup group);

// One GCN propagation step relu(A_hat H W + b); exposed for the per-node
// equivalence and gradient tests.
nn::Matrix gcn_layer_forward(const SparseAdjacency& a_hat, const nn::Matrix& h,
                             const nn::Parameter& w, const nn::Parameter* b);

nn::Matrix readout_mean(const nn::Matrix& h_final);

struct TrainConfig {
    int epochs = 200;
    int batch_size = 128;
    std::uint64_t seed = 0;
    nn::LRSchedule schedule;
    bool deterministic = true;
    FeatureGroup features = FeatureGroup::Both;
};

struct EpochStats {
    int epoch = 0;
    double lr = 0.0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double train_f1 = 0.0;
    double val_f1 = 0.0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    double seconds = 0.0;

    void write_csv(std::ostream& out) const;
};

// Minimizes the BCE loss over the train split in shuffled batches; history
// records per-epoch metrics. Throws NumericError if the loss diverges.
TrainHistory train(GCNModel& model, const GraphDataset& dataset, const TrainConfig& config);
TrainHistory train(MLPModel& model, const GraphDataset& dataset, const TrainConfig& config);

std::vector<int> predict_classes(const GCNModel& model, const GraphDataset& dataset,
                                 const std::vector<int>& indices, FeatureGroup group);
std::vector<int> predict_classes(const MLPModel& model, const GraphDataset& dataset,
                                 const std::vector<int>& indices, FeatureGroup group);

// Versioned JSON checkpoints; loading validates the architecture descriptor.
void save_checkpoint(const GCNModel& model, FeatureGroup group, const std::string& path);
void save_checkpoint(const MLPModel& model, FeatureGroup group, const std::string& path);
struct Checkpoint {
    std::string model_kind;  // "gcn" | "mlp"
    FeatureGroup group = FeatureGroup::Both;
    GCNModel gcn;
    MLPModel mlp;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gridsa
