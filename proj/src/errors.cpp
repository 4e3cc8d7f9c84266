#include "kitwpa/errors.hpp"

namespace kitwpa {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidParameter: return "invalid parameter";
        case ErrorKind::OutOfRange: return "out of range";
        case ErrorKind::Domain: return "physics domain";
        case ErrorKind::StepSize: return "step size";
        case ErrorKind::Data: return "data";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

}  // namespace kitwpa
