#pragma once

#include "artinhodge/algebra.hpp"
#include "artinhodge/complexes.hpp"
#include "artinhodge/error.hpp"
#include "artinhodge/hodge.hpp"
#include "artinhodge/io.hpp"
#include "artinhodge/matrix.hpp"
#include "artinhodge/module.hpp"
#include "artinhodge/scalar.hpp"
#include "artinhodge/snc.hpp"
#include "artinhodge/weil.hpp"
