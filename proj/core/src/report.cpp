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

#include "risdoa/report.hpp"
#include "risdoa/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace risdoa
{
    void Table::add(std::vector<Cell> row)
    {
        require(row.size() == columns.size(), "table row width does not match header");
        rows.push_back(std::move(row));
    }

    std::string format_cell(const Cell &cell)
    {
        struct Visitor
        {
            std::string operator()(std::monostate) const { return {}; }
            std::string operator()(double v) const
            {
                char buf[40];
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                return buf;
            }
            std::string operator()(std::int64_t v) const { return std::to_string(v); }
            std::string operator()(const std::string &v) const
            {
                if (v.find_first_of(",\"\n") == std::string::npos)
                    return v;
                std::string quoted = "\"";
                for (char c : v)
                {
                    if (c == '"')
                        quoted += '"';
                    quoted += c;
                }
                return quoted + "\"";
            }
            std::string operator()(bool v) const { return v ? "true" : "false"; }
        };
        return std::visit(Visitor{}, cell);
    }

    void write_csv(std::ostream &out, const Table &table)
    {
        for (std::size_t i = 0; i < table.columns.size(); ++i)
            out << (i ? "," : "") << table.columns[i];
        out << '\n';
        for (const auto &row : table.rows)
        {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "," : "") << format_cell(row[i]);
            out << '\n';
        }
    }

    namespace
    {
        nlohmann::ordered_json cell_json(const Cell &cell)
        {
            struct Visitor
            {
                nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
                nlohmann::ordered_json operator()(double v) const
                {
                    // JSON has no inf/nan.
                    if (!std::isfinite(v))
                        return format_cell(v);
                    return v;
                }
                nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
                nlohmann::ordered_json operator()(const std::string &v) const { return v; }
                nlohmann::ordered_json operator()(bool v) const { return v; }
            };
            return std::visit(Visitor{}, cell);
        }

        std::ofstream open_for_write(const std::string &path)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw IoError("cannot open output file '" + path + "'");
            return out;
        }

        void finish(std::ofstream &out, const std::string &path)
        {
            out.flush();
            if (!out)
                throw IoError("failed writing output file '" + path + "'");
        }
    }

    std::string tables_to_json(const std::string &config_json, const std::vector<NamedTable> &tables)
    {
        nlohmann::ordered_json doc;
        doc["config"] = nlohmann::ordered_json::parse(config_json);
        doc["rows"] = nlohmann::ordered_json::array();
        for (const auto &[name, table] : tables)
        {
            auto rows = nlohmann::ordered_json::array();
            for (const auto &row : table.rows)
            {
                nlohmann::ordered_json obj = nlohmann::ordered_json::object();
                for (std::size_t i = 0; i < row.size(); ++i)
                    obj[table.columns[i]] = cell_json(row[i]);
                rows.push_back(std::move(obj));
            }
            doc[name] = std::move(rows);
        }
        return doc.dump(2) + "\n";
    }

    void write_csv_files(const std::string &path, const std::vector<NamedTable> &tables)
    {
        if (path.empty())
        {
            for (std::size_t i = 0; i < tables.size(); ++i)
            {
                if (i)
                    std::cout << '\n';
                write_csv(std::cout, tables[i].table);
            }
            std::cout.flush();
            return;
        }
        for (std::size_t i = 0; i < tables.size(); ++i)
        {
            const std::string target = i == 0 ? path : path + "." + tables[i].name + ".csv";
            auto out = open_for_write(target);
            write_csv(out, tables[i].table);
            finish(out, target);
        }
    }

    void write_json_file(const std::string &path, const std::string &config_json,
                         const std::vector<NamedTable> &tables)
    {
        const std::string doc = tables_to_json(config_json, tables);
        if (path.empty())
        {
            std::cout << doc;
            std::cout.flush();
            return;
        }
        auto out = open_for_write(path);
        out << doc;
        finish(out, path);
    }
}
