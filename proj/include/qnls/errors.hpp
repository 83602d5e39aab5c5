#pragma once

#include <stdexcept>
#include <string>

namespace qnls {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridMismatch : Error { using Error::Error; };
struct NonpositiveInteraction : Error { using Error::Error; };
struct NoDescent : Error { using Error::Error; };
struct NotConverged : Error { using Error::Error; };
struct PositiveEnergy : Error { using Error::Error; };
struct ZeroMassComponent : Error { using Error::Error; };
struct NegativeInteraction : Error { using Error::Error; };
struct TooCloseToBlowup : Error { using Error::Error; };
struct KappaMismatch : Error { using Error::Error; };
struct MassNotMinimal : Error { using Error::Error; };
struct CannotAchieve : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct InsufficientGrowth : Error { using Error::Error; };
struct MassConditionViolated : Error { using Error::Error; };
struct CorruptSnapshot : Error { using Error::Error; };
struct VersionMismatch : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace qnls
