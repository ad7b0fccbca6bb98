#include "fpl/trajectory_io.hpp"

#include <cstdlib>
#include <sstream>
#include <vector>

#include "fpl/errors.hpp"
#include "fpl/format.hpp"

namespace fpl {

namespace {

std::vector<std::string> split_fields(const std::string &line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    size_t a = field.find_first_not_of(" \t\r");
    size_t b = field.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos
                      ? std::string()
                      : field.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',')
    out.push_back("");
  return out;
}

double parse_number(const std::string &s, size_t line_no) {
  const char *begin = s.c_str();
  char *end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ParseError("trajectory line " + std::to_string(line_no) +
                     ": '" + s + "' is not a number");
  return v;
}

} // namespace

Trajectory parse_trajectory(const std::string &csv_text) {
  std::stringstream ss(csv_text);
  std::string line;
  size_t line_no = 0;

  if (!std::getline(ss, line))
    throw ParseError("trajectory CSV is empty");
  ++line_no;
  auto header = split_fields(line);
  if (header.size() < 2 || header[0] != "t")
    throw ParseError("trajectory header must be t,s1,...,sn");
  size_t dim = header.size() - 1;
  for (size_t i = 1; i < header.size(); ++i)
    if (header[i].empty())
      throw ParseError("trajectory header has an empty column name");

  std::vector<double> times;
  std::vector<Eigen::VectorXd> points;
  while (std::getline(ss, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    auto fields = split_fields(line);
    if (fields.size() != dim + 1)
      throw ParseError("trajectory line " + std::to_string(line_no) +
                       ": expected " + std::to_string(dim + 1) +
                       " fields, got " + std::to_string(fields.size()));
    times.push_back(parse_number(fields[0], line_no));
    Eigen::VectorXd p(dim);
    for (size_t i = 0; i < dim; ++i)
      p(static_cast<Eigen::Index>(i)) = parse_number(fields[i + 1], line_no);
    points.push_back(std::move(p));
  }
  if (times.empty())
    throw ParseError("trajectory CSV has no samples");
  try {
    return Trajectory(std::move(times), std::move(points));
  } catch (const Error &e) {
    throw ParseError(std::string("trajectory CSV: ") + e.what());
  }
}

std::string emit_trajectory(const Trajectory &z) {
  std::string out = "t";
  for (int i = 1; i <= z.dim(); ++i)
    out += ",s" + std::to_string(i);
  out += "\n";
  for (size_t i = 0; i < z.sample_count(); ++i) {
    out += format_shortest(z.times()[i]);
    for (int j = 0; j < z.dim(); ++j)
      out += "," + format_shortest(z.point(i)(j));
    out += "\n";
  }
  return out;
}

} // namespace fpl
