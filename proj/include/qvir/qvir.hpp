#pragma once

#include "qvir/catalog.hpp"
#include "qvir/errors.hpp"
#include "qvir/field.hpp"
#include "qvir/macdonald.hpp"
#include "qvir/mutation.hpp"
#include "qvir/nekrasov.hpp"
#include "qvir/operators.hpp"
#include "qvir/params.hpp"
#include "qvir/qkit.hpp"
#include "qvir/series.hpp"
