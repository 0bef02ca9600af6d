#pragma once

#include <string>
#include <vector>

#include "latstat/experiments.hpp"
#include "latstat/geometry.hpp"

namespace latstat {

// "rect:xmin,xmax,ymin,ymax", "disk:cx,cy,r" or "tri:sigma". Zero-area and
// malformed regions throw std::invalid_argument.
Region parse_region(const std::string& text);

// "shear:b", "scale:a", "translate:x,y", "neg", "rot:theta" or
// "affine:a11,a12,a21,a22,tx,ty".
AffineMap parse_element(const std::string& text);

// "uniform", "interval:lo,hi", "triangular" or "table:p1,p2,...".
LambdaLaw parse_lambda(const std::string& text);

std::vector<double> parse_reals(const std::string& text);

// Exit codes: 0 success, 1 bad arguments or failed precondition, 2 I/O error.
int cli_main(int argc, char** argv);

}  // namespace latstat
