#pragma once

#include "padendro/dendrogram.hpp"
#include "padendro/encoding.hpp"
#include "padendro/error.hpp"
#include "padendro/family.hpp"
#include "padendro/hidden.hpp"
#include "padendro/io.hpp"
#include "padendro/padic.hpp"
