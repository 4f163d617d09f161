#include <gtest/gtest.h>
#include "evoptim/evoptim.hpp"
