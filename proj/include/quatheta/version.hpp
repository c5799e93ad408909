#pragma once

namespace qth {

const char* version();

}
