#include "spindex/symplectic_path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace spindex {

void SymplecticPath2::validate() const {
    if (samples.size() < 2)
        throw std::invalid_argument("path needs at least two samples");
    const PathSample& first = samples.front();
    if (first.t != 0.0)
        throw std::invalid_argument("path must start at t = 0");
    Mat2 id = Mat2::identity();
    if ((first.m - id).frobenius() != 0.0)
        throw std::invalid_argument("path must start at the identity matrix");
    double prev_t = -1.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const PathSample& s = samples[i];
        double f2 = s.m.frobenius();
        f2 *= f2;
        // det of a large matrix is only representable to ~eps * |M|^2
        double det_tol = kDetTol + 32.0 * 2.2e-16 * f2;
        if (std::abs(s.m.det() - 1.0) > det_tol)
            throw std::invalid_argument("non-symplectic sample at t = " + std::to_string(s.t) +
                                        ": |det - 1| = " + std::to_string(std::abs(s.m.det() - 1.0)));
        if (i > 0) {
            if (s.t <= prev_t)
                throw std::invalid_argument("sample times must be strictly increasing");
            double scale = std::max(1.0, std::min(s.m.frobenius(), samples[i - 1].m.frobenius()));
            if ((s.m - samples[i - 1].m).frobenius() > kStepBound * scale)
                throw std::invalid_argument("consecutive samples too far apart at t = " +
                                            std::to_string(s.t));
        }
        prev_t = s.t;
    }
    if (samples.back().t != 1.0)
        throw std::invalid_argument("path must end at t = 1");
}

namespace {

Mat2 project_sl2(const Mat2& m) {
    double dt = m.det();
    if (dt <= 0.0)
        throw std::runtime_error("interpolant left SL(2,R); refine the source path");
    double s = 1.0 / std::sqrt(dt);
    return m * s;
}

}  // namespace

SymplecticPath2 SymplecticPath2::refined(double max_step) const {
    SymplecticPath2 out;
    out.source = source;
    out.samples.reserve(samples.size());
    out.samples.push_back(samples.front());
    for (size_t i = 1; i < samples.size(); ++i) {
        const PathSample& lo = samples[i - 1];
        const PathSample& hi = samples[i];
        double scale = std::max(1.0, std::min(lo.m.frobenius(), hi.m.frobenius()));
        double gap = (hi.m - lo.m).frobenius() / scale;
        int pieces = gap > max_step ? static_cast<int>(std::ceil(gap / max_step)) : 1;
        for (int j = 1; j < pieces; ++j) {
            double w = static_cast<double>(j) / pieces;
            Mat2 mid = lo.m * (1.0 - w) + hi.m * w;
            out.samples.push_back({lo.t + w * (hi.t - lo.t), project_sl2(mid)});
        }
        out.samples.push_back(hi);
    }
    return out;
}

SymplecticPath2 sample_path(const std::string& source, int n,
                            const std::function<Mat2(double)>& f) {
    if (n < 2) throw std::invalid_argument("need at least two samples");
    SymplecticPath2 path;
    path.source = source;
    path.samples.reserve(n);
    for (int i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / (n - 1);
        path.samples.push_back({t, f(t)});
    }
    path.samples.front().t = 0.0;
    path.samples.back().t = 1.0;
    return path;
}

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

std::string path_to_json(const SymplecticPath2& path) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < path.samples.size(); ++i) {
        const PathSample& s = path.samples[i];
        if (i) os << ",";
        os << "{\"t\":" << fmt17(s.t) << ",\"m\":[" << fmt17(s.m.a) << "," << fmt17(s.m.b)
           << "," << fmt17(s.m.c) << "," << fmt17(s.m.d) << "]}";
    }
    os << "]";
    return os.str();
}

SymplecticPath2 path_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_array()) throw std::invalid_argument("path JSON must be an array");
    SymplecticPath2 path;
    path.source = "json";
    for (const auto& rec : j) {
        auto m = rec.at("m");
        if (!m.is_array() || m.size() != 4)
            throw std::invalid_argument("path record field m must be [m11,m12,m21,m22]");
        path.samples.push_back({rec.at("t").get<double>(),
                                Mat2(m[0].get<double>(), m[1].get<double>(),
                                     m[2].get<double>(), m[3].get<double>())});
    }
    return path;
}

}  // namespace spindex
