#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "subdet/ep.hpp"
#include "subdet/glr_fo.hpp"
#include "subdet/scenario.hpp"

namespace subdet {

/// The twelve implemented decision statistics. Names in files and on the CLI
/// are the usual acronyms (FO-KS-HE, ..., EP-SO-US-PHE); larger output always
/// favors H1 and H1 is declared when statistic > eta.
enum class DetectorId {
    FO_KS_HE,
    FO_KS_PHE,
    FO_US_HE,
    FO_US_PHE,
    EP_FO_KS_HE,
    EP_FO_KS_PHE,
    EP_FO_US_HE,
    EP_FO_US_PHE,
    EP_SO_KS_HE,
    EP_SO_KS_PHE,
    EP_SO_US_HE,
    EP_SO_US_PHE,
};

inline constexpr std::array<DetectorId, 12> kAllDetectors = {
    DetectorId::FO_KS_HE,    DetectorId::FO_KS_PHE,   DetectorId::FO_US_HE,
    DetectorId::FO_US_PHE,   DetectorId::EP_FO_KS_HE, DetectorId::EP_FO_KS_PHE,
    DetectorId::EP_FO_US_HE, DetectorId::EP_FO_US_PHE, DetectorId::EP_SO_KS_HE,
    DetectorId::EP_SO_KS_PHE, DetectorId::EP_SO_US_HE, DetectorId::EP_SO_US_PHE,
};

std::string_view detector_name(DetectorId id);
std::optional<DetectorId> detector_from_name(std::string_view name);

bool detector_is_ep(DetectorId id);
bool detector_known_subspace(DetectorId id);
Environment detector_env(DetectorId id);
SignalOrder detector_order(DetectorId id);

/// Throws PreconditionError when the detector's dimension conditions fail for
/// the given problem sizes; checked before any Monte Carlo run starts.
void check_detector_preconditions(DetectorId id, int n, int k_p, int k_s, int r);

/// One dataset, many detectors: the GLR and EP families each build their
/// shared whitening/eigenvalue state at most once.
class DetectorWorkspace {
public:
    DetectorWorkspace(const Dataset& data, const SubspaceBasis& subspace, int r);

    double evaluate(DetectorId id);

private:
    GlrInput& glr();
    EpInput& ep();

    const Dataset& data_;
    const SubspaceBasis& subspace_;
    int r_;
    std::optional<GlrInput> glr_;
    std::optional<EpInput> ep_;
};

}  // namespace subdet
