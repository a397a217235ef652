#include "kcgof/sample_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace kcgof {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no, const std::string& column) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("line " + std::to_string(line_no) + ", column " + column + ": cannot parse '" + cell +
                     "' as a number");
  }
  if (!std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line_no) + ", column " + column + ": non-finite value");
  }
  return v;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

JointSample read_sample(std::istream& in, Index dx, Index dy) {
  if (dx < 1 || dy < 1) throw std::invalid_argument("read_sample: dx and dy must be positive");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty sample file");
  const std::vector<std::string> header = split_line(line);

  std::vector<std::size_t> columns;
  std::vector<std::string> names;
  auto locate = [&](const std::string& name) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) {
        columns.push_back(c);
        names.push_back(name);
        return;
      }
    }
    throw ParseError("header: missing column " + name);
  };
  for (Index t = 1; t <= dx; ++t) locate("x" + std::to_string(t));
  for (Index t = 1; t <= dy; ++t) locate("y" + std::to_string(t));

  std::vector<double> values;
  std::size_t line_no = 1;
  Index rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() < header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t k = 0; k < columns.size(); ++k) values.push_back(parse_cell(cells[columns[k]], line_no, names[k]));
    ++rows;
  }
  if (rows < 2) throw ParseError("sample needs at least 2 data rows, found " + std::to_string(rows));

  Matrix xs(rows, dx);
  Matrix ys(rows, dy);
  const std::size_t width = columns.size();
  for (Index i = 0; i < rows; ++i) {
    for (Index t = 0; t < dx; ++t) xs(i, t) = values[static_cast<std::size_t>(i) * width + static_cast<std::size_t>(t)];
    for (Index t = 0; t < dy; ++t) {
      ys(i, t) = values[static_cast<std::size_t>(i) * width + static_cast<std::size_t>(dx + t)];
    }
  }
  return JointSample(std::move(xs), std::move(ys));
}

JointSample load_sample(const std::filesystem::path& path, Index dx, Index dy) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open sample file");
  try {
    return read_sample(in, dx, dy);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_sample(std::ostream& out, const JointSample& sample) {
  std::string text;
  for (Index t = 1; t <= sample.dx(); ++t) text += (t > 1 ? ",x" : "x") + std::to_string(t);
  for (Index t = 1; t <= sample.dy(); ++t) text += ",y" + std::to_string(t);
  text += '\n';
  for (Index i = 0; i < sample.size(); ++i) {
    for (Index t = 0; t < sample.dx(); ++t) {
      if (t > 0) text += ',';
      append_number(text, sample.xs()(i, t));
    }
    for (Index t = 0; t < sample.dy(); ++t) {
      text += ',';
      append_number(text, sample.ys()(i, t));
    }
    text += '\n';
  }
  out << text;
}

void save_sample(const std::filesystem::path& path, const JointSample& sample) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  write_sample(out, sample);
}

}  // namespace kcgof
