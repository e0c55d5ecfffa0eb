#pragma once

#include <stdexcept>

namespace panelid {

// Base type for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };        // argument outside a link/model domain
struct DimensionMismatch : Error { using Error::Error; };  // inconsistent T/K across inputs
struct CapExceeded : Error { using Error::Error; };        // T outside the supported range
struct MalformedLP : Error { using Error::Error; };        // bad indices / non-finite data
struct EmptySet : Error { using Error::Error; };           // no feasible candidate on the scan grid
struct NoObservations : Error { using Error::Error; };     // conditioning cell empty in data
struct NoSignChange : Error { using Error::Error; };       // root bracket does not straddle zero
struct EmptyCell : Error { using Error::Error; };          // a (y1,x1) frequency cell has no rows
struct NoSwitchers : Error { using Error::Error; };        // no informative switcher units
struct DegenerateWeight : Error { using Error::Error; };   // a needed inverse-frequency weight is infinite
struct ConfigError : Error { using Error::Error; };        // malformed or inconsistent run configuration

} // namespace panelid
