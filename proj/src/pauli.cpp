#include "vgp/pauli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "vgp/errors.hpp"

namespace vgp {

char PauliString::letter(int site) const {
  const bool bx = x >> site & 1, bz = z >> site & 1;
  if (bx && bz) return 'Y';
  if (bx) return 'X';
  if (bz) return 'Z';
  return 'I';
}

bool pattern_less(const PauliString& a, const PauliString& b, int n_spins) {
  for (int s = 0; s < n_spins; ++s) {
    const char la = a.letter(s), lb = b.letter(s);
    if (la != lb) return la < lb;  // 'I' < 'X' < 'Y' < 'Z' in ASCII
  }
  return false;
}

PauliSum::PauliSum(int n_spins) : n_(n_spins) {
  if (n_spins < 1 || n_spins > 32)
    throw ValidationError(fmt::format("number of spins must be in [1, 32], got {}", n_spins));
}

void PauliSum::add(double coeff, PauliString ops) {
  if (!std::isfinite(coeff)) throw ValidationError("Pauli coefficient must be finite");
  const Mask limit = n_ == 32 ? ~Mask{0} : (Mask{1} << n_) - 1;
  if ((ops.x | ops.z) & ~limit) throw ValidationError("Pauli string acts outside the spin range");
  auto it = std::lower_bound(terms_.begin(), terms_.end(), ops,
                             [this](const PauliTerm& t, const PauliString& s) {
                               return pattern_less(t.ops, s, n_);
                             });
  if (it != terms_.end() && it->ops == ops) {
    it->coeff += coeff;
    if (it->coeff == 0.0) terms_.erase(it);
  } else if (coeff != 0.0) {
    terms_.insert(it, PauliTerm{coeff, ops});
  }
}

void PauliSum::prune(double tol) {
  std::erase_if(terms_, [tol](const PauliTerm& t) { return std::abs(t.coeff) <= tol; });
}

bool operator==(const PauliSum& a, const PauliSum& b) {
  if (a.n_ != b.n_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t k = 0; k < a.terms_.size(); ++k)
    if (!(a.terms_[k].ops == b.terms_[k].ops) || a.terms_[k].coeff != b.terms_[k].coeff)
      return false;
  return true;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

double parse_coefficient(std::string_view tok, int line) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto r = std::from_chars(first, tok.data() + tok.size(), v);
  if (r.ec != std::errc()) throw ParseError(line, fmt::format("malformed coefficient '{}'", tok));
  if (r.ptr != tok.data() + tok.size()) {
    const std::string_view rest(r.ptr, static_cast<std::size_t>(tok.data() + tok.size() - r.ptr));
    if (rest.find_first_of("ijIJ") != std::string_view::npos)
      throw ParseError(line, fmt::format("non-real coefficient '{}'", tok));
    throw ParseError(line, fmt::format("malformed coefficient '{}'", tok));
  }
  if (!std::isfinite(v)) throw ParseError(line, "coefficient must be finite");
  return v;
}

}  // namespace

PauliSum parse_hamiltonian(std::string_view text) {
  PauliSum out;
  bool have_n = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    raw = raw.substr(0, raw.find('#'));
    const auto line = trim(raw);
    if (line.empty()) continue;

    if (line.rfind("N=", 0) == 0 || line.rfind("N =", 0) == 0) {
      if (have_n) throw ParseError(line_no, "duplicate N declaration");
      const auto eq = line.find('=');
      int n = 0;
      if (!parse_int(trim(line.substr(eq + 1)), n))
        throw ParseError(line_no, fmt::format("malformed N declaration '{}'", line));
      if (n < 1 || n > 32) throw ParseError(line_no, "N must be in [1, 32]");
      out = PauliSum(n);
      have_n = true;
      continue;
    }
    if (!have_n) throw ParseError(line_no, "expected 'N=<int>' before any term");

    const auto tokens = split_ws(line);
    const double coeff = parse_coefficient(tokens.front(), line_no);
    PauliString ops;
    Mask seen = 0;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const auto tok = tokens[k];
      const char letter = tok.front();
      int site = 0;
      if ((letter != 'X' && letter != 'Y' && letter != 'Z') || !parse_int(tok.substr(1), site) ||
          site < 0)
        throw ParseError(line_no, fmt::format("malformed token '{}'", tok));
      if (site >= out.n_spins()) throw ParseError(line_no, "site index out of range");
      const Mask bit = Mask{1} << site;
      if (seen & bit) throw ParseError(line_no, fmt::format("duplicate site {} in term", site));
      seen |= bit;
      if (letter == 'X' || letter == 'Y') ops.x |= bit;
      if (letter == 'Z' || letter == 'Y') ops.z |= bit;
    }
    out.add(coeff, ops);
  }
  if (!have_n) throw ParseError(line_no, "missing 'N=<int>' declaration");
  return out;
}

std::string serialize(const PauliSum& h) {
  std::string out = fmt::format("N={}\n", h.n_spins());
  for (const auto& t : h.terms()) {
    out += fmt::format("{:.17g}", t.coeff);
    for (int s = 0; s < h.n_spins(); ++s) {
      const char l = t.ops.letter(s);
      if (l != 'I') out += fmt::format(" {}{}", l, s);
    }
    out += '\n';
  }
  return out;
}

HermitianMatrix to_dense(const PauliSum& h, int cap) {
  const int n = h.n_spins();
  if (n > cap)
    throw GuardError("dense_cap", fmt::format("{} spins exceed the dense cap of {}", n, cap));
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix m = CMatrix::Zero(dim, dim);
  static const cplx minus_i_pow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  for (const auto& t : h.terms()) {
    const cplx c = t.coeff * minus_i_pow[t.ops.y_count() % 4];
    for (State z = 0; z < static_cast<State>(dim); ++z) {
      const State to = z ^ t.ops.x;
      m(to, z) += parity(t.ops.z & to) ? -c : c;
    }
  }
  return HermitianMatrix(m, 1e-12);
}

HermitianMatrix conjugate_diagonal(const HermitianMatrix& h, const std::vector<double>& phases) {
  if (static_cast<Eigen::Index>(phases.size()) != h.dim())
    throw ValidationError(fmt::format("phase vector has length {}, expected {}", phases.size(),
                                      h.dim()));
  CMatrix m = h.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j) m(i, j) *= std::polar(1.0, phases[i] - phases[j]);
  return HermitianMatrix(m);
}

HermitianMatrix conjugate_diagonal(const PauliSum& h, const std::vector<double>& phases) {
  return conjugate_diagonal(to_dense(h), phases);
}

PauliSum conjugate_pauli(const PauliSum& h, const PauliString& p) {
  PauliSum out(h.n_spins());
  for (const auto& t : h.terms()) {
    const bool anti = parity((p.x & t.ops.z) ^ (p.z & t.ops.x));
    out.add(anti ? -t.coeff : t.coeff, t.ops);
  }
  return out;
}

PauliSum conjugate_xstring(const PauliSum& h, Mask mask) {
  return conjugate_pauli(h, PauliString{mask, 0});
}

OperatorBuilder::OperatorBuilder(int n_spins) : n_(n_spins) { PauliSum check(n_spins); }

void OperatorBuilder::add_zx(cplx coeff, Mask z_mask, Mask x_mask) {
  static const cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const PauliString ops{x_mask, z_mask};
  const cplx c = coeff * i_pow[popcount(x_mask & z_mask) % 4];
  for (auto& e : entries_)
    if (e.ops == ops) {
      e.coeff += c;
      return;
    }
  entries_.push_back({ops, c});
}

PauliSum OperatorBuilder::build(double tol) const {
  PauliSum out(n_);
  for (const auto& e : entries_) {
    if (std::abs(e.coeff.imag()) > tol * std::max(1.0, std::abs(e.coeff)))
      throw ValidationError(fmt::format("operator is not Hermitian: string with imaginary weight {}",
                                        e.coeff.imag()));
    if (std::abs(e.coeff.real()) > tol) out.add(e.coeff.real(), e.ops);
  }
  return out;
}

}  // namespace vgp
