#pragma once

// CSV serialization of a run record.  Fixed header, 12 significant digits,
// atomic write (temp file + rename), trailing comment line with the
// termination status and the decay rate.

#include <cstdio>
#include <stdexcept>
#include <string>

#include "burgersim/sim.hpp"

namespace burgersim {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

inline const char* kCsvHeader = "t,u_a,r,e,bound,norm_uhat,meanU_residual,superpos_residual";

namespace detail {

inline std::string format_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

inline std::string render_csv(const RunRecord& rec) {
    using detail::format_g12;
    std::string out(kCsvHeader);
    out += '\n';
    for (const Sample& s : rec.samples) {
        out += format_g12(s.t);
        out += ',';
        out += format_g12(s.u_a);
        out += ',';
        out += format_g12(s.r);
        out += ',';
        out += format_g12(s.e);
        out += ',';
        out += format_g12(s.bound);
        out += ',';
        out += format_g12(s.norm_uhat);
        out += ',';
        out += format_g12(s.mean_res);
        out += ',';
        out += format_g12(s.sup_res);
        out += '\n';
    }
    out += "# status=";
    out += run_status_name(rec.status);
    out += " lambda=";
    out += format_g12(rec.lambda);
    if (rec.status != RunStatus::completed) {
        out += " fail_time=";
        out += format_g12(rec.fail_time);
    }
    out += '\n';
    return out;
}

inline void emit_csv(const RunRecord& rec, const std::string& path) {
    const std::string tmp = path + ".tmp";
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw IoError("cannot open '" + tmp + "' for writing");
    const std::string body = render_csv(rec);
    const bool wrote = std::fwrite(body.data(), 1, body.size(), f) == body.size();
    const bool closed = std::fclose(f) == 0;
    if (!wrote || !closed) {
        std::remove(tmp.c_str());
        throw IoError("failed writing '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("failed renaming '" + tmp + "' to '" + path + "'");
    }
}

}  // namespace burgersim
