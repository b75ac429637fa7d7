#pragma once

#include <string>
#include <vector>

#include "binfac/network.hpp"
#include "binfac/report.hpp"
#include "binfac/resource_metrics.hpp"

namespace binfac {

// LeNet-300-100 on MNIST: the study shape of the experiment harness.
inline const std::vector<std::size_t> kLenetDims = {784, 300, 100, 10};

// "1-0-0" -> {true, false, false}; token count must match num_layers.
std::vector<bool> parse_config_mask(const std::string& label, std::size_t num_layers);

struct ExperimentConfig {
    std::string mask_label = "1-1-1";
    // Optional ranks; either one per weight matrix or one per factorized
    // matrix in order. Empty selects ceil(min(n, m)/2) per layer.
    std::vector<std::size_t> inner_ranks;
    TrainConfig train;
    std::string data_dir;
    std::string checkpoint_path; // required; written on success only
};

// Builds the LeNet-300-100 spec for a mask label plus optional ranks.
NetworkSpec lenet_spec(const std::string& mask_label,
                       const std::vector<std::size_t>& inner_ranks = {});

// Audits a network into a report row (static metrics only; error_rate
// as supplied).
template <typename T>
ResourceReport audit_network(const Network<T>& net, std::string label, double error_rate = 0.0) {
    ResourceReport row;
    row.config_label = std::move(label);
    row.memory_bits = memory_bits(net);
    row.flop_equivalents = flop_equivalents(net);
    row.sparsity = sparsity(net, 0.0);
    row.error_rate = error_rate;
    return row;
}

// Trains the masked LeNet-300-100 on the MNIST train split, evaluates
// on the 10k test split, audits memory/FLOPs/sparsity, writes the
// checkpoint, and returns the report row. Nothing is written when any
// stage fails.
ResourceReport run_experiment(const ExperimentConfig& cfg);

} // namespace binfac
