#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "lpvl1/param_matrix.hpp"

namespace lpvl1 {

/// Proof-carrying result of an LMI computation: decision matrices, scalars,
/// the grid it was solved on and the post-hoc residual of the verification
/// pass on the finer grid.
struct Certificate {
    std::string kind;    // stability | ppg | synthesis | baseline
    std::string system;  // name of the certified map

    std::map<std::string, double> scalars;       // mu, upsilon, gamma, mu_P, tau, ...
    std::map<std::string, ParamMatrix> decisions;  // P, X, Y, Ahat, ...

    std::vector<int> solve_counts;
    std::vector<int> verify_counts;
    double max_residual = std::numeric_limits<double>::quiet_NaN();
    double eps_rel = 0.0;
    double margin = 0.0;
    bool verified = false;

    std::string solver_status;
    int newton_steps = 0;

    double scalar(const std::string& key) const {
        auto it = scalars.find(key);
        if (it == scalars.end()) throw std::invalid_argument("Certificate: missing scalar " + key);
        return it->second;
    }

    const ParamMatrix& decision(const std::string& key) const {
        auto it = decisions.find(key);
        if (it == decisions.end()) throw std::invalid_argument("Certificate: missing decision " + key);
        return it->second;
    }

    bool has_scalar(const std::string& key) const { return scalars.count(key) > 0; }
};

}  // namespace lpvl1
