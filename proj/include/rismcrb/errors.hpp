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

#ifndef RISMCRB_ERRORS_HPP
#define RISMCRB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rismcrb
{
    // Base class for every error raised by the library.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class InvalidArgument : public Error
    {
    public:
        using Error::Error;
    };

    // A position coincides with an RIS element (or the RIS center), so a
    // distance or unit vector is undefined.
    class SingularGeometry : public Error
    {
    public:
        using Error::Error;
    };

    // The effective channel vanishes (all-zero response or gain vector).
    class DegenerateChannel : public Error
    {
    public:
        using Error::Error;
    };

    class IllConditioned : public Error
    {
    public:
        IllConditioned(const std::string &what, double condition)
            : Error(what), condition_number(condition) {}
        double condition_number;
    };

    // Every optimizer start diverged.
    class NoSolution : public Error
    {
    public:
        using Error::Error;
    };

    class UnsupportedRange : public Error
    {
    public:
        using Error::Error;
    };

    // Raised by the estimator when the observations carry no information.
    class NoInit : public Error
    {
    public:
        using Error::Error;
    };

    class ConfigError : public Error
    {
    public:
        ConfigError(const std::string &what, int line_no = 0)
            : Error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + what : what), line(line_no) {}
        int line;
    };
}

#endif
