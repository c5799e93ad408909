#include "quatheta/version.hpp"

namespace qth {

const char* version() { return "0.1.0"; }

}
