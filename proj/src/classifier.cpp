// SPDX-License-Identifier: Apache-2.0
#include "mcsloc/classifier.hpp"

namespace mcsloc {

void ClassifierConfig::validate() const
{
    if (frame_length < std::size_t(kMinClassifierLength))
        throw ConfigError("classifier: frame length must be at least 64 samples");
    if (!(noise_power > 0.0) || !std::isfinite(noise_power))
        throw ConfigError("classifier: noise power must be positive and finite");
    if (!(thresholds[0] < thresholds[1] && thresholds[1] < thresholds[2]))
        throw ConfigError("classifier: thresholds must be strictly increasing");
}

} // namespace mcsloc
