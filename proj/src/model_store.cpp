#include "ssam/model_store.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ssam/errors.hpp"

namespace ssam {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(std::string_view s, const std::string& context) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("bundle corruption: bad number '" + std::string(s) + "' in " + context);
  }
  return value;
}

std::uint64_t parse_u64(std::string_view s, const std::string& context) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("bundle corruption: bad integer '" + std::string(s) + "' in " + context);
  }
  return value;
}

std::string next_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("bundle truncated");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

void save(const ModelBundle& bundle, std::ostream& sink) {
  validate_shapes(bundle.params);
  if (!(bundle.scaler.max > bundle.scaler.min)) {
    throw DataError("bundle scaler is degenerate (max <= min)");
  }

  const ModelConfig& cfg = bundle.params.config;
  std::ostringstream out;
  out << "ssam-bundle " << bundle.format_version << "\n";
  out << "model input_dim " << cfg.input_dim << "\n";
  out << "model hidden_units " << cfg.hidden_units << "\n";
  out << "model time_step " << cfg.time_step << "\n";
  out << "model attention_dim " << cfg.attention_dim << "\n";
  out << "model activation " << to_string(cfg.post_attention_activation) << "\n";
  out << "model seed " << cfg.seed << "\n";
  out << "model use_attention " << (cfg.use_attention ? 1 : 0) << "\n";
  out << "train epochs " << bundle.train.epochs << "\n";
  out << "train batch_size " << bundle.train.batch_size << "\n";
  out << "train learning_rate " << fmt_double(bundle.train.learning_rate) << "\n";
  out << "train beta1 " << fmt_double(bundle.train.beta1) << "\n";
  out << "train beta2 " << fmt_double(bundle.train.beta2) << "\n";
  out << "train epsilon " << fmt_double(bundle.train.epsilon) << "\n";
  out << "train shuffle_seed " << bundle.train.shuffle_seed << "\n";
  out << "train shuffle " << (bundle.train.shuffle ? 1 : 0) << "\n";
  out << "data feature " << bundle.data.feature << "\n";
  out << "data split_ratio " << fmt_double(bundle.data.split_ratio) << "\n";
  out << "data fit_scaler_on " << (bundle.data.fit_scaler_on_all ? "all" : "train") << "\n";
  out << "scaler min " << fmt_double(bundle.scaler.min) << "\n";
  out << "scaler max " << fmt_double(bundle.scaler.max) << "\n";

  const auto tensors = bundle.params.tensors();
  out << "tensors " << tensors.size() << "\n";
  for (const auto& ref : tensors) {
    const Matrix& m = *ref.tensor;
    out << "tensor " << ref.name << " " << m.rows() << " " << m.cols() << "\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        if (c > 0) out << ' ';
        out << fmt_double(m(r, c));
      }
      out << "\n";
    }
  }
  out << "end\n";
  sink << out.str();
  if (!sink) {
    throw Error("I/O error while writing bundle");
  }
}

ModelBundle load(std::istream& source) {
  std::string line = next_line(source);
  {
    std::istringstream hdr(line);
    std::string magic;
    int version = -1;
    hdr >> magic >> version;
    if (magic != "ssam-bundle") {
      throw DataError("not a model bundle (bad magic line '" + line + "')");
    }
    if (version != kBundleFormatVersion) {
      throw DataError("unsupported bundle version " + std::to_string(version));
    }
  }

  ModelBundle bundle;
  ModelConfig cfg;
  std::size_t tensor_count = 0;

  // Header key-values until the tensor table starts.
  while (true) {
    line = next_line(source);
    std::istringstream ls(line);
    std::string section, key;
    ls >> section;
    if (section == "tensors") {
      ls >> tensor_count;
      break;
    }
    ls >> key;
    std::string value;
    std::getline(ls, value);
    if (!value.empty() && value.front() == ' ') value.erase(0, 1);
    const std::string context = section + " " + key;

    if (section == "model") {
      if (key == "input_dim") cfg.input_dim = parse_u64(value, context);
      else if (key == "hidden_units") cfg.hidden_units = parse_u64(value, context);
      else if (key == "time_step") cfg.time_step = parse_u64(value, context);
      else if (key == "attention_dim") cfg.attention_dim = parse_u64(value, context);
      else if (key == "activation") cfg.post_attention_activation = activation_from_string(value);
      else if (key == "seed") cfg.seed = parse_u64(value, context);
      else if (key == "use_attention") cfg.use_attention = parse_u64(value, context) != 0;
      else throw DataError("unknown bundle key '" + context + "'");
    } else if (section == "train") {
      if (key == "epochs") bundle.train.epochs = parse_u64(value, context);
      else if (key == "batch_size") bundle.train.batch_size = parse_u64(value, context);
      else if (key == "learning_rate") bundle.train.learning_rate = parse_double(value, context);
      else if (key == "beta1") bundle.train.beta1 = parse_double(value, context);
      else if (key == "beta2") bundle.train.beta2 = parse_double(value, context);
      else if (key == "epsilon") bundle.train.epsilon = parse_double(value, context);
      else if (key == "shuffle_seed") bundle.train.shuffle_seed = parse_u64(value, context);
      else if (key == "shuffle") bundle.train.shuffle = parse_u64(value, context) != 0;
      else throw DataError("unknown bundle key '" + context + "'");
    } else if (section == "data") {
      if (key == "feature") bundle.data.feature = value;
      else if (key == "split_ratio") bundle.data.split_ratio = parse_double(value, context);
      else if (key == "fit_scaler_on") bundle.data.fit_scaler_on_all = (value == "all");
      else throw DataError("unknown bundle key '" + context + "'");
    } else if (section == "scaler") {
      if (key == "min") bundle.scaler.min = parse_double(value, context);
      else if (key == "max") bundle.scaler.max = parse_double(value, context);
      else throw DataError("unknown bundle key '" + context + "'");
    } else {
      throw DataError("unknown bundle section '" + section + "'");
    }
  }

  std::map<std::string, Matrix> parsed;
  for (std::size_t i = 0; i < tensor_count; ++i) {
    line = next_line(source);
    std::istringstream ts(line);
    std::string tag, name;
    std::size_t rows = 0, cols = 0;
    ts >> tag >> name >> rows >> cols;
    if (tag != "tensor" || rows == 0 || cols == 0) {
      throw DataError("bundle corruption: bad tensor header '" + line + "'");
    }
    std::vector<double> values;
    values.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      line = next_line(source);
      std::size_t pos = 0;
      std::size_t count = 0;
      while (pos < line.size()) {
        while (pos < line.size() && line[pos] == ' ') ++pos;
        if (pos >= line.size()) break;
        std::size_t end = line.find(' ', pos);
        if (end == std::string::npos) end = line.size();
        values.push_back(parse_double({line.data() + pos, end - pos}, "tensor " + name));
        ++count;
        pos = end;
      }
      if (count != cols) {
        throw DataError("bundle corruption: tensor " + name + " row " + std::to_string(r) +
                        " holds " + std::to_string(count) + " values, expected " +
                        std::to_string(cols));
      }
    }
    if (!parsed.emplace(name, Matrix(rows, cols, std::move(values))).second) {
      throw DataError("bundle corruption: duplicate tensor '" + name + "'");
    }
  }

  line = next_line(source);
  if (line != "end") {
    throw DataError("bundle corruption: expected trailing 'end', got '" + line + "'");
  }

  bundle.params.config = cfg;
  const auto take = [&](const char* name) {
    auto it = parsed.find(name);
    if (it == parsed.end()) return Matrix{};
    Matrix m = std::move(it->second);
    parsed.erase(it);
    return m;
  };
  bundle.params.lstm.w_f = take("lstm.w_f");
  bundle.params.lstm.w_i = take("lstm.w_i");
  bundle.params.lstm.w_g = take("lstm.w_g");
  bundle.params.lstm.w_o = take("lstm.w_o");
  bundle.params.lstm.u_f = take("lstm.u_f");
  bundle.params.lstm.u_i = take("lstm.u_i");
  bundle.params.lstm.u_g = take("lstm.u_g");
  bundle.params.lstm.u_o = take("lstm.u_o");
  bundle.params.lstm.b_f = take("lstm.b_f");
  bundle.params.lstm.b_i = take("lstm.b_i");
  bundle.params.lstm.b_g = take("lstm.b_g");
  bundle.params.lstm.b_o = take("lstm.b_o");
  bundle.params.attention.w_q = take("attn.w_q");
  bundle.params.attention.w_k = take("attn.w_k");
  bundle.params.attention.w_v = take("attn.w_v");
  bundle.params.attention.b_q = take("attn.b_q");
  bundle.params.attention.b_k = take("attn.b_k");
  bundle.params.attention.b_v = take("attn.b_v");
  bundle.params.dense.w = take("dense.w");
  bundle.params.dense.b = take("dense.b");
  if (!parsed.empty()) {
    throw DataError("bundle corruption: unknown tensor '" + parsed.begin()->first + "'");
  }

  validate_shapes(bundle.params);
  if (!(bundle.scaler.max > bundle.scaler.min)) {
    throw DataError("bundle scaler is degenerate (max <= min)");
  }
  return bundle;
}

void save_file(const ModelBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open '" + path.string() + "' for writing");
  }
  save(bundle, out);
}

ModelBundle load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open model bundle '" + path.string() + "'");
  }
  return load(in);
}

}  // namespace ssam
