#include "opcalc/errors.hpp"

// Exceptions are header-only; this TU anchors the target.
