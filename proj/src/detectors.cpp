#include "subdet/detectors.hpp"

#include <sstream>

namespace subdet {

namespace {

struct DetectorTraits {
    DetectorId id;
    std::string_view name;
    bool ep;
    bool known_subspace;
    Environment env;
    SignalOrder order;
};

constexpr std::array<DetectorTraits, 12> kTraits = {{
    {DetectorId::FO_KS_HE, "FO-KS-HE", false, true, Environment::HE, SignalOrder::First},
    {DetectorId::FO_KS_PHE, "FO-KS-PHE", false, true, Environment::PHE, SignalOrder::First},
    {DetectorId::FO_US_HE, "FO-US-HE", false, false, Environment::HE, SignalOrder::First},
    {DetectorId::FO_US_PHE, "FO-US-PHE", false, false, Environment::PHE, SignalOrder::First},
    {DetectorId::EP_FO_KS_HE, "EP-FO-KS-HE", true, true, Environment::HE, SignalOrder::First},
    {DetectorId::EP_FO_KS_PHE, "EP-FO-KS-PHE", true, true, Environment::PHE, SignalOrder::First},
    {DetectorId::EP_FO_US_HE, "EP-FO-US-HE", true, false, Environment::HE, SignalOrder::First},
    {DetectorId::EP_FO_US_PHE, "EP-FO-US-PHE", true, false, Environment::PHE, SignalOrder::First},
    {DetectorId::EP_SO_KS_HE, "EP-SO-KS-HE", true, true, Environment::HE, SignalOrder::Second},
    {DetectorId::EP_SO_KS_PHE, "EP-SO-KS-PHE", true, true, Environment::PHE, SignalOrder::Second},
    {DetectorId::EP_SO_US_HE, "EP-SO-US-HE", true, false, Environment::HE, SignalOrder::Second},
    {DetectorId::EP_SO_US_PHE, "EP-SO-US-PHE", true, false, Environment::PHE, SignalOrder::Second},
}};

const DetectorTraits& traits(DetectorId id) { return kTraits[static_cast<std::size_t>(id)]; }

}  // namespace

std::string_view detector_name(DetectorId id) { return traits(id).name; }

std::optional<DetectorId> detector_from_name(std::string_view name) {
    for (const auto& t : kTraits) {
        if (t.name == name) return t.id;
    }
    return std::nullopt;
}

bool detector_is_ep(DetectorId id) { return traits(id).ep; }
bool detector_known_subspace(DetectorId id) { return traits(id).known_subspace; }
Environment detector_env(DetectorId id) { return traits(id).env; }
SignalOrder detector_order(DetectorId id) { return traits(id).order; }

void check_detector_preconditions(DetectorId id, int n, int k_p, int k_s, int r) {
    const int k = k_p + k_s;
    std::ostringstream msg;
    if (k_s < n) {
        msg << detector_name(id) << " requires K_S >= N; got K_S=" << k_s << ", N=" << n;
        throw PreconditionError(msg.str());
    }
    switch (id) {
        case DetectorId::FO_KS_PHE:
            if (!(r < n && std::min(k_p, n - r) * k > n * k_p)) {
                msg << "FO-KS-PHE requires r < N and min(K_P, N-r) > N*K_P/K; got N=" << n
                    << ", K_P=" << k_p << ", K_S=" << k_s << ", r=" << r;
                throw PreconditionError(msg.str());
            }
            break;
        case DetectorId::FO_US_PHE:
            if (!(std::min(n, k_p) >= r + 1 && std::min(n, k_p) * k > n * k_p + r * k)) {
                msg << "FO-US-PHE requires min(N,K_P) >= r+1 and min(N,K_P) > N*K_P/K + r; got N="
                    << n << ", K_P=" << k_p << ", K_S=" << k_s << ", r=" << r;
                throw PreconditionError(msg.str());
            }
            break;
        default:
            break;
    }
}

DetectorWorkspace::DetectorWorkspace(const Dataset& data, const SubspaceBasis& subspace, int r)
    : data_(data), subspace_(subspace), r_(r) {}

GlrInput& DetectorWorkspace::glr() {
    if (!glr_) {
        glr_.emplace(data_.z_p, data_.z_s, subspace_.h, r_);
    }
    return *glr_;
}

EpInput& DetectorWorkspace::ep() {
    if (!ep_) {
        ep_.emplace(data_.z_p, data_.z_s, subspace_.h, r_);
    }
    return *ep_;
}

double DetectorWorkspace::evaluate(DetectorId id) {
    switch (id) {
        case DetectorId::FO_KS_HE: return stat_fo_ks_he(glr());
        case DetectorId::FO_KS_PHE: return stat_fo_ks_phe(glr());
        case DetectorId::FO_US_HE: return stat_fo_us_he(glr());
        case DetectorId::FO_US_PHE: return stat_fo_us_phe(glr());
        case DetectorId::EP_FO_KS_HE: return stat_ep_fo_ks_he(ep());
        case DetectorId::EP_FO_KS_PHE: return stat_ep_fo_ks_phe(ep());
        case DetectorId::EP_FO_US_HE: return stat_ep_fo_us_he(ep());
        case DetectorId::EP_FO_US_PHE: return stat_ep_fo_us_phe(ep());
        case DetectorId::EP_SO_KS_HE: return stat_ep_so_ks_he(ep());
        case DetectorId::EP_SO_KS_PHE: return stat_ep_so_ks_phe(ep());
        case DetectorId::EP_SO_US_HE: return stat_ep_so_us_he(ep());
        case DetectorId::EP_SO_US_PHE: return stat_ep_so_us_phe(ep());
    }
    throw Error("unknown detector id");
}

}  // namespace subdet
