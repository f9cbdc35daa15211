#pragma once

#include "kernelbayes/bayes.hpp"
#include "kernelbayes/error.hpp"
#include "kernelbayes/giry.hpp"
#include "kernelbayes/kernel.hpp"
#include "kernelbayes/measure.hpp"
#include "kernelbayes/rational.hpp"
#include "kernelbayes/space.hpp"
#include "kernelbayes/transport.hpp"
