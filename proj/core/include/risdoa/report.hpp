// SPDX-License-Identifier: Apache-2.0
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

#ifndef RISDOA_REPORT_HPP
#define RISDOA_REPORT_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace risdoa
{
    // Empty cells (monostate) become "" in CSV and null in JSON.
    using Cell = std::variant<std::monostate, double, std::int64_t, std::string, bool>;

    struct Table
    {
        std::vector<std::string> columns;
        std::vector<std::vector<Cell>> rows;

        void add(std::vector<Cell> row);
    };

    struct NamedTable
    {
        std::string name;
        Table table;
    };

    // Doubles use %.17g so every value round-trips.
    std::string format_cell(const Cell &cell);
    void write_csv(std::ostream &out, const Table &table);

    // {"config": <config_json>, "<name>": [ {column: value, ...}, ... ], ...}
    // with the tables in order. config_json must be a serialized JSON object.
    std::string tables_to_json(const std::string &config_json, const std::vector<NamedTable> &tables);

    // CSV: the first table goes to `path` and table "x" to "<path>.x.csv"; with
    // an empty path everything goes to stdout, tables separated by a blank line.
    // JSON: a single document. Throws IoError when a file cannot be written.
    void write_csv_files(const std::string &path, const std::vector<NamedTable> &tables);
    void write_json_file(const std::string &path, const std::string &config_json,
                         const std::vector<NamedTable> &tables);
}

#endif
