#include "frame/penalty.hpp"

#include <algorithm>

namespace frame {

PenaltySpec PenaltySpec::scad(double a) {
    if (a <= 2.0) throw UsageError("scad penalty requires a > 2");
    return {Kind::scad, a};
}

PenaltySpec PenaltySpec::mcp(double a) {
    if (a <= 1.0) throw UsageError("mcp penalty requires a > 1");
    return {Kind::mcp, a};
}

PenaltySpec PenaltySpec::parse(const std::string& name) {
    if (name == "identity") return identity();
    if (name == "scad") return scad();
    if (name == "mcp") return mcp();
    throw UsageError("unknown penalty '" + name + "'; expected identity, scad or mcp");
}

std::string PenaltySpec::name() const {
    switch (kind) {
        case Kind::identity: return "identity";
        case Kind::scad: return "scad";
        case Kind::mcp: return "mcp";
    }
    return "identity";
}

double PenaltySpec::value(double t, double lambda) const {
    t = std::max(t, 0.0);
    switch (kind) {
        case Kind::identity:
            return lambda * t;
        case Kind::scad: {
            if (lambda <= 0.0) return 0.0;
            if (t <= lambda) return lambda * t;
            if (t <= a * lambda) {
                return (2.0 * a * lambda * t - t * t - lambda * lambda) / (2.0 * (a - 1.0));
            }
            return lambda * lambda * (a + 1.0) / 2.0;
        }
        case Kind::mcp: {
            if (lambda <= 0.0) return 0.0;
            if (t <= a * lambda) return lambda * t - t * t / (2.0 * a);
            return a * lambda * lambda / 2.0;
        }
    }
    return lambda * t;
}

double PenaltySpec::derivative(double t, double lambda) const {
    t = std::max(t, 0.0);
    switch (kind) {
        case Kind::identity:
            return 1.0;
        case Kind::scad: {
            if (lambda <= 0.0) return 0.0;
            if (t <= lambda) return 1.0;
            return std::max(a * lambda - t, 0.0) / ((a - 1.0) * lambda);
        }
        case Kind::mcp: {
            if (lambda <= 0.0) return 0.0;
            return std::max(1.0 - t / (a * lambda), 0.0);
        }
    }
    return 1.0;
}

}  // namespace frame
