#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "cliffkern/bench.hpp"

namespace cliffkern {

namespace {

template <class T>
void put(std::string& out, T value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, res.ptr);
}

template <class T>
T get(const std::string& field, std::size_t line, const char* name) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw Error(Errc::ConfigInvalid,
                "CSV line " + std::to_string(line) + ": bad " + name + " value '" + field + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string emit_csv(const std::vector<BenchRecord>& records) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const BenchRecord& r : records) {
    out += r.kind;
    out += ',';
    out += r.variant;
    for (std::size_t v : {r.k, r.B, r.C_in, r.C_out, r.d_image, r.d_filter, r.W, r.U}) {
      out += ',';
      put(out, v);
    }
    out += ',';
    put(out, r.flops);
    for (double v : {r.median_s, r.min_s, r.flops_per_s}) {
      out += ',';
      put(out, v);
    }
    out += ',';
    put(out, r.bytes);
    out += '\n';
  }
  return out;
}

std::vector<BenchRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::ConfigInvalid, "CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw Error(Errc::ConfigInvalid, "unexpected CSV header '" + line + "'");
  std::vector<BenchRecord> records;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split(line);
    if (f.size() != 15) {
      throw Error(Errc::ConfigInvalid, "CSV line " + std::to_string(n) + " has " + std::to_string(f.size()) +
                                           " fields, expected 15");
    }
    BenchRecord r;
    r.kind = f[0];
    r.variant = f[1];
    r.k = get<std::size_t>(f[2], n, "k");
    r.B = get<std::size_t>(f[3], n, "B");
    r.C_in = get<std::size_t>(f[4], n, "C_in");
    r.C_out = get<std::size_t>(f[5], n, "C_out");
    r.d_image = get<std::size_t>(f[6], n, "d_image");
    r.d_filter = get<std::size_t>(f[7], n, "d_filter");
    r.W = get<std::size_t>(f[8], n, "W");
    r.U = get<std::size_t>(f[9], n, "U");
    r.flops = get<std::int64_t>(f[10], n, "flops");
    r.median_s = get<double>(f[11], n, "median_s");
    r.min_s = get<double>(f[12], n, "min_s");
    r.flops_per_s = get<double>(f[13], n, "flops_per_s");
    r.bytes = get<std::size_t>(f[14], n, "bytes");
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

double axis_value(const BenchRecord& r, const std::string& axis) {
  if (axis == "C") return static_cast<double>(r.C_in);
  if (axis == "C_out") return static_cast<double>(r.C_out);
  if (axis == "B") return static_cast<double>(r.B);
  if (axis == "d_image") return static_cast<double>(r.d_image);
  if (axis == "d_filter") return static_cast<double>(r.d_filter);
  if (axis == "W") return static_cast<double>(r.W);
  if (axis == "U") return static_cast<double>(r.U);
  if (axis == "bytes") return static_cast<double>(r.bytes);
  throw Error(Errc::AxisMismatch, "unknown plot axis '" + axis + "'");
}

std::string series_name(const BenchRecord& r, const std::string& axis) {
  std::string name = r.variant;
  if (r.W != 0 && axis != "W") name += " W" + std::to_string(r.W);
  if (r.U != 0 && axis != "U") name += " U" + std::to_string(r.U);
  return name;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string emit_plot(const std::vector<BenchRecord>& records, const PlotSpec& spec) {
  if (records.empty()) throw Error(Errc::AxisMismatch, "no records to plot");
  for (const BenchRecord& r : records) {
    if (r.kind != records.front().kind) {
      throw Error(Errc::AxisMismatch, "records mix kinds " + records.front().kind + " and " + r.kind);
    }
  }
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::vector<std::string> order;
  for (const BenchRecord& r : records) {
    const std::string name = series_name(r, spec.axis);
    auto [it, inserted] = series.try_emplace(name);
    if (inserted) order.push_back(name);
    const double x = axis_value(r, spec.axis);
    for (const auto& p : it->second) {
      if (p.first == x) {
        throw Error(Errc::AxisMismatch, "variant '" + name + "' has two records at " + spec.axis + "=" + fmt(x) +
                                            "; the records do not share the sweep axis");
      }
    }
    it->second.emplace_back(x, r.flops_per_s / 1e9);
  }
  for (auto& [name, pts] : series) std::sort(pts.begin(), pts.end());

  double x_lo = INFINITY, x_hi = -INFINITY, y_hi = 0.0;
  for (const auto& [name, pts] : series)
    for (const auto& [x, y] : pts) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_hi = std::max(y_hi, y);
    }
  const bool log_x = spec.log_x && x_lo > 0;
  auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
  double a = tx(x_lo), b = tx(x_hi);
  if (a == b) {
    a -= 1.0;
    b += 1.0;
  }
  if (y_hi <= 0) y_hi = 1.0;
  y_hi *= 1.1;

  const double W = 720, H = 440, left = 70, right = 190, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (tx(x) - a) / (b - a) * pw; };
  auto py = [&](double y) { return top + ph - y / y_hi * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::string title = spec.title.empty() ? records.front().kind + " throughput" : spec.title;
  s << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
    << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double yv = y_hi * i / 5.0;
    s << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << py(yv) << "\" y2=\"" << py(yv)
      << "\" stroke=\"#ddd\"/>\n";
    s << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
  }
  std::vector<double> ticks;
  for (const auto& [name, pts] : series)
    for (const auto& p : pts) ticks.push_back(p.first);
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  for (double t : ticks) {
    s << "<text x=\"" << px(t) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << fmt(t)
      << "</text>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">" << escape(spec.axis)
    << "</text>\n";
  s << "<text transform=\"rotate(-90)\" x=\"" << -(top + ph / 2) << "\" y=\"18\" text-anchor=\"middle\">GFLOP/s</text>\n";

  if (spec.axis == "bytes") {
    for (const auto& [label, bytes] : spec.cache_sizes) {
      if (bytes <= 0 || tx(bytes) < a || tx(bytes) > b) continue;
      s << "<line x1=\"" << px(bytes) << "\" x2=\"" << px(bytes) << "\" y1=\"" << top << "\" y2=\"" << top + ph
        << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
      s << "<text x=\"" << px(bytes) + 3 << "\" y=\"" << top + 12 << "\" fill=\"#666\">" << escape(label)
        << "</text>\n";
    }
  }

  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& pts = series[order[i]];
    const char* color = kPalette[i % std::size(kPalette)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) s << px(x) << ',' << py(y) << ' ';
    s << "\"/>\n";
    for (const auto& [x, y] : pts) {
      s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = top + 14 + 18.0 * static_cast<double>(i);
    s << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 32 << "\" y1=\"" << ly - 4 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly << "\">" << escape(order[i]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace cliffkern
