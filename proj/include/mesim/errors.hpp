#pragma once

#include <stdexcept>
#include <string>

namespace mesim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// electric network
struct NonRadialTopology : Error { using Error::Error; };
struct NotConverged : Error { using Error::Error; };
struct VoltageCollapse : Error { using Error::Error; };

// gas network
struct IntegrationUnstable : Error { using Error::Error; };
struct NegativeMass : Error { using Error::Error; };

// plant
struct BufferUnderflow : Error { using Error::Error; };

// dispatch
struct UnmappedTransformer : Error { using Error::Error; };

// scenario loading
struct ParseError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct DanglingReference : Error { using Error::Error; };
struct HorizonMismatch : Error { using Error::Error; };

// engine / reporting
struct SimulationFault : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct IncompleteTrace : Error { using Error::Error; };
struct ScenarioMismatch : Error { using Error::Error; };
struct UnknownView : Error { using Error::Error; };
struct WindowOutOfRange : Error { using Error::Error; };

} // namespace mesim
