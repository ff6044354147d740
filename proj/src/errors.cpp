#include "pairstats/errors.hpp"

namespace pairstats {

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Usage: return 1;
        case ErrorKind::Parse:
        case ErrorKind::Validation: return 2;
        case ErrorKind::Numeric: return 3;
    }
    return 3;
}

}  // namespace pairstats
