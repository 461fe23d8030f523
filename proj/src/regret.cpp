#include "kchase/core.hpp"
