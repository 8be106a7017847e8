/* Copyright 2026 The rigidity-lab Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ========================================================================= */

#ifndef RIGIDITY_LAB_ERROR_HPP
#define RIGIDITY_LAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rigidity_lab {

// Base for every error thrown by the library. The message is prefixed with the
// module that raised it so the CLI can propagate it unchanged.
class Error : public std::runtime_error {
public:
    Error(const std::string& module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(module), message_(what) {}

    const std::string& module() const noexcept { return module_; }
    // The message without the module prefix.
    const std::string& message() const noexcept { return message_; }

private:
    std::string module_;
    std::string message_;
};

// Raised for configuration problems; carries the JSON pointer of the offending field.
class ConfigError : public Error {
public:
    ConfigError(const std::string& pointer, const std::string& what)
        : Error("config", (pointer.empty() ? std::string("/") : pointer) + ": " + what),
          pointer_(pointer),
          reason_(what) {}

    const std::string& pointer() const noexcept { return pointer_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string pointer_;
    std::string reason_;
};

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_ERROR_HPP
