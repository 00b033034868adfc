#pragma once

#include <string>

#include "frame/errors.hpp"

namespace frame {

/// Group penalty rho applied to block norms. The objective carries
/// lambda * rho(t); for SCAD and MCP the penalty is folded so that
/// lambda * rho(t) equals the textbook p_lambda(t).
struct PenaltySpec {
    enum class Kind { identity, scad, mcp };

    Kind kind = Kind::identity;
    double a = 3.7;  // concavity parameter for scad/mcp

    static PenaltySpec identity() { return {Kind::identity, 0.0}; }
    static PenaltySpec scad(double a = 3.7);
    static PenaltySpec mcp(double a = 3.0);
    static PenaltySpec parse(const std::string& name);

    std::string name() const;

    /// lambda * rho(t) for t >= 0.
    double value(double t, double lambda) const;

    /// rho'(t); the LLA weight so that lambda_eff = lambda * derivative(t).
    double derivative(double t, double lambda) const;
};

}  // namespace frame
