#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lilbound/models.hpp"
#include "lilbound/phi.hpp"
#include "lilbound/profiles.hpp"

namespace lilbound {

/// A model id resolved to what the bound engine and the simulator need.
/// Surrogate profiles ("powerlaw:...") carry no simulatable model.
struct ResolvedModel {
    std::string id;
    std::optional<MartingaleModel> model;
    SigmaProfile sigma;
    std::int64_t index_offset = 0;
    std::optional<PhiFunction> phi;
};

struct RegistryEntry {
    std::string pattern;
    std::string description;
};

/// "chaos:d=2", "weightedA:beta=1[,noise=weibull,r=1.5]", "powerlaw:gamma=0.5[,M=log|invlog]".
ResolvedModel resolve_model(const std::string& id);
/// "phi2", "power:q=3", "cosh", "subexp", "table:<path.csv>".
PhiFunction resolve_phi(const std::string& id);
/// "loglog:r=2", "const:c=1", "table:<path.csv>".
NormingSequence resolve_norming(const std::string& id);

std::vector<RegistryEntry> model_registry();
std::vector<RegistryEntry> phi_registry();
std::vector<RegistryEntry> norming_registry();

}  // namespace lilbound
