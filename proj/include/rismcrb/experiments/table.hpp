// SPDX-License-Identifier: Apache-2.0
//
// rismcrb - localization bounds under RIS amplitude-model mismatch
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISMCRB_EXPERIMENTS_TABLE_HPP
#define RISMCRB_EXPERIMENTS_TABLE_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "../errors.hpp"

namespace rismcrb::experiments
{
    // 9 significant digits, fixed spelling for non-finite values.
    inline std::string fmt(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
        return buf;
    }

    inline std::string fmt(int v) { return std::to_string(v); }
    inline std::string fmt(long v) { return std::to_string(v); }
    inline std::string fmt(long long v) { return std::to_string(v); }
    inline std::string fmt(std::uint64_t v) { return std::to_string(v); }

    struct Table
    {
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;

        template <class... Ts>
        void add(const Ts &...values)
        {
            rows.push_back({fmt(values)...});
            if (rows.back().size() != header.size())
                throw InvalidArgument("Table: row width does not match header");
        }

        void write_csv(std::ostream &os) const
        {
            for (std::size_t i = 0; i < header.size(); ++i)
                os << (i ? "," : "") << header[i];
            os << '\n';
            for (const auto &r : rows)
            {
                for (std::size_t i = 0; i < r.size(); ++i)
                    os << (i ? "," : "") << r[i];
                os << '\n';
            }
        }

        // Whitespace separated, '#' header, blank line whenever the first column changes.
        void write_gnuplot(std::ostream &os) const
        {
            os << '#';
            for (const auto &h : header)
                os << ' ' << h;
            os << '\n';
            for (std::size_t k = 0; k < rows.size(); ++k)
            {
                if (k > 0 && rows[k][0] != rows[k - 1][0])
                    os << '\n';
                for (std::size_t i = 0; i < rows[k].size(); ++i)
                    os << (i ? " " : "") << rows[k][i];
                os << '\n';
            }
        }
    };

    inline void write_file(const std::string &path, const Table &t, bool gnuplot = false)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw Error("cannot write '" + path + "'");
        if (gnuplot)
            t.write_gnuplot(out);
        else
            t.write_csv(out);
    }
}

#endif
