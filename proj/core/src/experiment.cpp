#include "binfac/experiment.hpp"

#include "binfac/checkpoint.hpp"
#include "binfac/mnist.hpp"

namespace binfac {

std::vector<bool> parse_config_mask(const std::string& label, std::size_t num_layers) {
    std::vector<bool> mask;
    std::size_t pos = 0;
    while (pos <= label.size()) {
        const std::size_t dash = label.find('-', pos);
        const std::string token = label.substr(pos, dash == std::string::npos ? dash : dash - pos);
        if (token == "0")
            mask.push_back(false);
        else if (token == "1")
            mask.push_back(true);
        else
            throw ConfigError("config mask '" + label + "': token '" + token +
                              "' is not 0 or 1");
        if (dash == std::string::npos) break;
        pos = dash + 1;
    }
    if (mask.size() != num_layers)
        throw ConfigError("config mask '" + label + "' has " + std::to_string(mask.size()) +
                          " tokens, expected " + std::to_string(num_layers));
    return mask;
}

NetworkSpec lenet_spec(const std::string& mask_label, const std::vector<std::size_t>& ranks) {
    NetworkSpec spec;
    spec.layer_dims = kLenetDims;
    spec.factorize_mask = parse_config_mask(mask_label, spec.num_weight_matrices());

    if (!ranks.empty()) {
        const std::size_t factorized =
            static_cast<std::size_t>(std::count(spec.factorize_mask.begin(),
                                                spec.factorize_mask.end(), true));
        if (ranks.size() == spec.num_weight_matrices()) {
            spec.inner_ranks = ranks;
        } else if (ranks.size() == factorized) {
            spec.inner_ranks.assign(spec.num_weight_matrices(), 0);
            std::size_t next = 0;
            for (std::size_t l = 0; l < spec.num_weight_matrices(); ++l)
                if (spec.factorize_mask[l]) spec.inner_ranks[l] = ranks[next++];
        } else {
            throw ConfigError("expected " + std::to_string(spec.num_weight_matrices()) + " or " +
                              std::to_string(factorized) + " ranks, got " +
                              std::to_string(ranks.size()));
        }
    }
    spec.validate();
    return spec;
}

ResourceReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.checkpoint_path.empty())
        throw ConfigError("run_experiment: checkpoint path is required");
    cfg.train.validate();

    const NetworkSpec spec = lenet_spec(cfg.mask_label, cfg.inner_ranks);
    const Dataset train_set = load_mnist(cfg.data_dir, /*train_split=*/true);
    const Dataset test_set = load_mnist(cfg.data_dir, /*train_split=*/false);

    auto [net, history] = train<float>(spec, cfg.train, train_set, test_set);
    const double error = evaluate(net, test_set);

    ResourceReport row = audit_network(net, cfg.mask_label, error);
    save_checkpoint(net, cfg.checkpoint_path);
    return row;
}

} // namespace binfac
